// Trains the 5-neuron full-adder network and shows what it learned: the
// final-window KL, the eight most-occupied states, and the exact Boltzmann
// distribution of the learned weights for comparison.

#include <cstdio>
#include <vector>

#include <autobm/autobm.hpp>

using namespace autobm;

int main() {
    const std::uint64_t seed = 1;
    std::printf("training full adder (5500 ns, averaged feed, seed %llu)...\n",
                static_cast<unsigned long long>(seed));
    const TrainResult res = run_full_adder(seed);

    std::printf("final-window KL = %.4f nats\n", res.final_kl);
    std::printf("KL(t):");
    for (std::size_t i = 0; i < res.trajectory.kl_series.size(); i += 10)
        std::printf(" %.0f:%.3f", res.trajectory.kl_series[i].t_ns,
                    res.trajectory.kl_series[i].kl);
    std::printf("\n\n");

    const double t_end = res.trace.t_end_ns;
    const Distribution occ = histogram(res.trace, t_end - 500.0, t_end);
    const Distribution exact = boltzmann_exact(res.final_weights, AnnealFactor(1.0));

    std::vector<std::size_t> order(occ.bins());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return occ[a] > occ[b]; });

    std::printf("top 8 states (A B Cin S Cout), last 500 ns vs exact Boltzmann:\n");
    std::printf("%-6s %-7s %-10s %-10s\n", "dec", "bits", "occupancy", "boltzmann");
    for (int r = 0; r < 8; ++r) {
        const std::size_t k = order[static_cast<std::size_t>(r)];
        std::printf("%-6zu %-7s %-10.4f %-10.4f\n", k,
                    index_to_config(static_cast<std::uint32_t>(k), 5).bits().c_str(), occ[k],
                    exact[k]);
    }
    return 0;
}
