// Trains the 15-pixel digit network, then completes each digit from its
// 6-pixel clamp at I0=2 and draws the result next to the trained image.

#include <cstdio>

#include <autobm/autobm.hpp>

using namespace autobm;

static void draw_row(const BipolarVector& img, int row, char on, char off) {
    for (int c = 0; c < 3; ++c) std::putchar(img[row * 3 + c] > 0 ? on : off);
}

int main() {
    const std::uint64_t seed = 1;
    std::printf("training 10 digits (3000 ns, averaged feed, seed %llu)...\n",
                static_cast<unsigned long long>(seed));
    const TrainResult res = run_digits(seed);
    std::printf("final-window KL = %.3f nats\n\n", res.final_kl);

    const DigitSet digits = DigitSet::canonical();
    const CompletionReport rep =
        run_completion(res.final_weights, digits, AnnealFactor(2.0), 100.0, seed);

    std::printf("completion at I0=2, 100 ns per digit (trained | completed):\n\n");
    for (const auto& r : rep.rows) {
        std::printf("digit %d: %s, correct-state occupancy %.2f\n", r.digit,
                    r.match ? "match" : "MISS", r.correct_occupancy);
        for (int row = 0; row < 5; ++row) {
            std::printf("    ");
            draw_row(digits.images[static_cast<std::size_t>(r.digit)], row, '#', '.');
            std::printf("   ");
            draw_row(r.majority, row, '#', '.');
            std::printf("\n");
        }
        std::printf("\n");
    }
    std::printf("%d/10 digits completed correctly\n", rep.correct_count());
    return 0;
}
