#pragma once

// Exact brute-force references used to validate the autonomous simulator:
// the Boltzmann distribution by full enumeration, a sequential-sweep Gibbs
// chain, and the discrete-time incremental learning rule in both its
// exact-gradient and persistent-chain forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace autobm {

inline constexpr int kMaxEnumerationBits = 20;

// p(k) proportional to exp(-i0 * E(config k)), by enumeration of all 2^N states.
inline Distribution boltzmann_exact(const WeightSet& w, AnnealFactor i0) {
    const int n = w.size();
    if (n > kMaxEnumerationBits)
        throw std::invalid_argument("boltzmann_exact: N too large for enumeration");
    const std::size_t bins = std::size_t{1} << n;
    std::vector<double> logp(bins);
    double max_logp = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins; ++k) {
        const auto m = index_to_config(static_cast<std::uint32_t>(k), n);
        logp[k] = -i0.value() * energy(m, w);
        if (logp[k] > max_logp) max_logp = logp[k];
    }
    std::vector<double> mass(bins);
    for (std::size_t k = 0; k < bins; ++k)
        mass[k] = std::exp(logp[k] - max_logp);
    return Distribution::from_unnormalized(n, std::move(mass));
}

// One full sweep of sequential single-site updates with
// P(m_i = +1) = (1 + tanh(i0 * I_i)) / 2, I_i = sum_j W_ij m_j + b_i.
inline BipolarVector gibbs_sweep(const WeightSet& w, BipolarVector m, AnnealFactor i0,
                                 RngStream& rng) {
    const int n = w.size();
    if (m.size() != n)
        throw std::invalid_argument("gibbs_sweep: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        double input = w.bias(i);
        for (int j = 0; j < n; ++j)
            if (j != i) input += w.weight(i, j) * m[j];
        const double p_plus = 0.5 * (1.0 + std::tanh(i0.value() * input));
        m.set(i, rng.bernoulli(p_plus) ? 1 : -1);
    }
    return m;
}

enum class LearnMode {
    ExactGradient, // model moments from boltzmann_exact each step
    Pcd            // model moments sampled from a persistent Gibbs chain
};

struct LearnOptions {
    double epsilon = 0.05;
    double lambda = 0.0125;
    long steps = 100000;
    std::uint64_t seed = 0;
    LearnMode mode = LearnMode::ExactGradient;
    bool learn_biases = true;
    int pcd_chains = 1;
    double weight_bound = 50.0; // |W_ij| or |b_i| beyond this aborts
};

// Raised when the discrete rule blows past the configured weight bound.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(long step, double value)
        : std::runtime_error("discrete learner diverged at step " + std::to_string(step) +
                             " (|w| = " + std::to_string(value) + ")"),
          step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

namespace detail {

// pair products of every configuration, bins x pair_count, built once
inline void enumerate_moment_table(int n, std::vector<std::int8_t>& spins,
                                   std::vector<std::int8_t>& pair_prod) {
    const std::size_t bins = std::size_t{1} << n;
    const int pairs = WeightSet::pair_count_of(n);
    spins.resize(bins * static_cast<std::size_t>(n));
    pair_prod.resize(bins * static_cast<std::size_t>(pairs));
    for (std::size_t k = 0; k < bins; ++k) {
        for (int i = 0; i < n; ++i)
            spins[k * n + i] = ((k >> (n - 1 - i)) & 1u) ? 1 : -1;
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++c)
                pair_prod[k * pairs + c] =
                    static_cast<std::int8_t>(spins[k * n + i] * spins[k * n + j]);
    }
}

} // namespace detail

// W_ij <- W_ij + eps * (<v_i v_j> - <m_i m_j> - lambda W_ij), and the analogous
// bias rule with site means, iterated for the requested number of steps.
inline WeightSet discrete_learn_reference(const TrainingSet& ts, const LearnOptions& opts) {
    if (!(opts.epsilon > 0.0))
        throw std::invalid_argument("discrete_learn_reference: epsilon must be > 0");
    if (opts.lambda < 0.0)
        throw std::invalid_argument("discrete_learn_reference: lambda must be >= 0");
    const int n = ts.vector_length();
    const int pairs = WeightSet::pair_count_of(n);
    const Correlations data = average_correlations(ts);

    std::vector<double> data_pair(static_cast<std::size_t>(pairs));
    {
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++c)
                data_pair[static_cast<std::size_t>(c)] = data.pair_mean(i, j);
    }

    WeightSet w(n);
    RngStream rng(opts.seed, /*stream=*/7);

    std::vector<std::int8_t> spins, pair_prod;
    if (opts.mode == LearnMode::ExactGradient) {
        if (n > kMaxEnumerationBits)
            throw std::invalid_argument("discrete_learn_reference: N too large for exact mode");
        detail::enumerate_moment_table(n, spins, pair_prod);
    }

    std::vector<BipolarVector> chains;
    if (opts.mode == LearnMode::Pcd) {
        if (opts.pcd_chains < 1)
            throw std::invalid_argument("discrete_learn_reference: pcd_chains must be >= 1");
        for (int c = 0; c < opts.pcd_chains; ++c) {
            std::vector<std::int8_t> init(static_cast<std::size_t>(n));
            for (auto& x : init) x = rng.bernoulli(0.5) ? 1 : -1;
            chains.emplace_back(std::move(init));
        }
    }

    std::vector<double> model_pair(static_cast<std::size_t>(pairs));
    std::vector<double> model_site(static_cast<std::size_t>(n));

    for (long step = 0; step < opts.steps; ++step) {
        std::fill(model_pair.begin(), model_pair.end(), 0.0);
        std::fill(model_site.begin(), model_site.end(), 0.0);

        if (opts.mode == LearnMode::ExactGradient) {
            const Distribution p = boltzmann_exact(w, AnnealFactor(1.0));
            for (std::size_t k = 0; k < p.bins(); ++k) {
                const double pk = p[k];
                if (pk == 0.0) continue;
                for (int c = 0; c < pairs; ++c)
                    model_pair[static_cast<std::size_t>(c)] += pk * pair_prod[k * pairs + c];
                for (int i = 0; i < n; ++i)
                    model_site[static_cast<std::size_t>(i)] += pk * spins[k * n + i];
            }
        } else {
            for (auto& chain : chains) {
                chain = gibbs_sweep(w, std::move(chain), AnnealFactor(1.0), rng);
                int c = 0;
                for (int i = 0; i < n; ++i) {
                    model_site[static_cast<std::size_t>(i)] += chain[i];
                    for (int j = i + 1; j < n; ++j, ++c)
                        model_pair[static_cast<std::size_t>(c)] += chain[i] * chain[j];
                }
            }
            const double inv = 1.0 / static_cast<double>(chains.size());
            for (auto& x : model_pair) x *= inv;
            for (auto& x : model_site) x *= inv;
        }

        auto upper = w.upper();
        for (int c = 0; c < pairs; ++c) {
            double& wc = upper[static_cast<std::size_t>(c)];
            wc += opts.epsilon * (data_pair[static_cast<std::size_t>(c)] -
                                  model_pair[static_cast<std::size_t>(c)] - opts.lambda * wc);
            if (std::abs(wc) > opts.weight_bound)
                throw DivergenceError(step, wc);
        }
        if (opts.learn_biases) {
            for (int i = 0; i < n; ++i) {
                double b = w.bias(i);
                b += opts.epsilon * (data.site_mean(i) - model_site[static_cast<std::size_t>(i)] -
                                     opts.lambda * b);
                if (std::abs(b) > opts.weight_bound)
                    throw DivergenceError(step, b);
                w.set_bias(i, b);
            }
        }
    }
    return w;
}

} // namespace autobm
