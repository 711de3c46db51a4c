#pragma once

// Canned reproductions of the two reference studies — full-adder
// distribution learning and 5x3 digit learning with image completion — plus
// a generic grid/seed sweep driver.

#include <cstdint>
#include <future>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"
#include "learning.hpp"
#include "rng.hpp"

namespace autobm {

// stable sub-seed for the k-th member of a batch
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (k + 1));
    return splitmix64_next(s);
}

// The eight rows of the full-adder truth table (A, B, C_in, S, C_out),
// uniform frequency 1/8. Encodings: {0, 6, 10, 13, 18, 21, 25, 31}.
inline TrainingSet full_adder_set() {
    static constexpr std::uint32_t kRows[8] = {0, 6, 10, 13, 18, 21, 25, 31};
    std::vector<BipolarVector> rows;
    rows.reserve(8);
    for (std::uint32_t enc : kRows) rows.push_back(index_to_config(enc, 5));
    return TrainingSet::uniform(std::move(rows));
}

struct FullAdderOptions {
    double duration_ns = 5500.0;
    double tau_n_ns = 0.1;
    FeedMode feed = FeedMode::Averaged;
    double dwell_ns = 1.0;
    TimingModel timing_model = TimingModel::Exponential;
    TrainDomain domain = TrainDomain::Dimensionless;
    double r_jitter_sigma = 0.0;
    double tau_n_jitter_sigma = 0.0;
};

// N=5, 10 weights, no biases, averaged feeding, 5500 ns by default.
inline TrainResult run_full_adder(std::uint64_t seed, const FullAdderOptions& opts = {}) {
    const TrainingSet ts = full_adder_set();
    const FeedSchedule sched = opts.feed == FeedMode::Averaged
                                   ? FeedSchedule::averaged(ts)
                                   : FeedSchedule::sequential(ts, opts.dwell_ns);
    CircuitParams p;
    p.tau_n_ns = opts.tau_n_ns;
    TrainOptions topts;
    topts.learn_biases = false;
    topts.timing_model = opts.timing_model;
    topts.domain = opts.domain;
    topts.r_jitter_sigma = opts.r_jitter_sigma;
    topts.tau_n_jitter_sigma = opts.tau_n_jitter_sigma;
    return train_detailed(WeightSet::zeros(5), sched, p, opts.duration_ns, topts, seed);
}

// Fixed 5x3 digit bitmaps (row-major, 5 rows x 3 columns) and one
// 6-pixel clamp pattern per digit. The patterns discriminate: no other
// digit agrees with a pattern on all six clamped pixels.
struct DigitSet {
    std::vector<BipolarVector> images; // 10 x 15
    std::vector<ClampSpec> clamps;     // pixel -> trained value, 6 per digit

    static DigitSet canonical() {
        static constexpr const char* kGlyphs[10] = {
            "111101101101111", // 0
            "010110010010111", // 1
            "111001111100111", // 2
            "111001111001111", // 3
            "101101111001001", // 4
            "111100111001111", // 5
            "111100111101111", // 6
            "111001001010010", // 7
            "111101111101111", // 8
            "111101111001111", // 9
        };
        static constexpr int kClamps[10][6] = {
            {3, 5, 7, 9, 11, 12},  {3, 4, 7, 8, 9, 11},  {2, 3, 5, 7, 9, 11},
            {3, 5, 7, 9, 11, 12},  {3, 5, 7, 9, 12, 13}, {0, 2, 3, 5, 9, 10},
            {0, 2, 5, 7, 9, 11},   {4, 7, 8, 9, 11, 12}, {3, 5, 7, 9, 11, 13},
            {0, 3, 5, 9, 10, 12},
        };
        DigitSet d;
        d.images.reserve(10);
        d.clamps.reserve(10);
        for (int k = 0; k < 10; ++k) {
            std::vector<std::int8_t> px(15);
            for (int i = 0; i < 15; ++i) px[static_cast<std::size_t>(i)] = kGlyphs[k][i] == '1' ? 1 : -1;
            BipolarVector img(std::move(px));
            ClampSpec c;
            for (int idx : kClamps[k]) c.pinned[idx] = img[idx];
            d.images.push_back(std::move(img));
            d.clamps.push_back(std::move(c));
        }
        return d;
    }

    TrainingSet training() const { return TrainingSet::uniform(images); }

    // every clamp pattern disagrees with every other digit somewhere
    bool discriminating() const {
        for (std::size_t a = 0; a < images.size(); ++a) {
            for (std::size_t b = 0; b < images.size(); ++b) {
                if (a == b) continue;
                bool differs = false;
                for (const auto& [idx, val] : clamps[a].pinned)
                    if (images[b][idx] != val) { differs = true; break; }
                if (!differs) return false;
            }
        }
        return true;
    }
};

struct DigitsOptions {
    double duration_ns = 3000.0;
    double tau_n_ns = 0.1;
    TimingModel timing_model = TimingModel::Exponential;
    TrainDomain domain = TrainDomain::Dimensionless;
};

// N=15: 105 reciprocal weights plus 15 biases, averaged feeding, 3000 ns.
inline TrainResult run_digits(std::uint64_t seed, const DigitsOptions& opts = {}) {
    const DigitSet digits = DigitSet::canonical();
    CircuitParams p;
    p.tau_n_ns = opts.tau_n_ns;
    TrainOptions topts;
    topts.learn_biases = true;
    topts.timing_model = opts.timing_model;
    topts.domain = opts.domain;
    return train_detailed(WeightSet::zeros(15), FeedSchedule::averaged(digits.training()), p,
                          opts.duration_ns, topts, seed);
}

struct CompletionReport {
    struct Row {
        int digit;
        BipolarVector majority; // full 15-pixel best-occupancy configuration
        bool match;
        double correct_occupancy; // occupancy fraction of the trained image
    };
    std::vector<Row> rows;

    int correct_count() const {
        int c = 0;
        for (const auto& r : rows) c += r.match ? 1 : 0;
        return c;
    }
};

// Clamp each digit's 6-pixel pattern, run free, decode the majority
// (highest-occupancy) configuration of the remaining pixels.
inline CompletionReport run_completion(const WeightSet& w, const DigitSet& digits,
                                       AnnealFactor i0, double duration_ns,
                                       std::uint64_t seed, const NeuronTiming& timing = {}) {
    if (w.size() != 15 || digits.images.size() != 10)
        throw std::invalid_argument("run_completion: expects N=15 weights and 10 digits");
    CompletionReport rep;
    for (int d = 0; d < 10; ++d) {
        const SimTrace trace = run_free(w, digits.clamps[static_cast<std::size_t>(d)], i0,
                                        duration_ns, timing, derive_seed(seed, static_cast<std::uint64_t>(d)));
        const Distribution h = histogram(trace, 0.0, duration_ns);
        std::size_t best = 0;
        for (std::size_t k = 1; k < h.bins(); ++k)
            if (h[k] > h[best]) best = k;
        BipolarVector majority = index_to_config(static_cast<std::uint32_t>(best), 15);
        const double occ = h[config_to_index(digits.images[static_cast<std::size_t>(d)])];
        const bool match = majority == digits.images[static_cast<std::size_t>(d)];
        rep.rows.push_back({d, std::move(majority), match, occ});
    }
    return rep;
}

// Grid x seed sweep. Rows are independent and run in parallel; individual
// failures land in the row, they do not abort the sweep.
struct SweepRow {
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    std::map<std::string, double> metrics;
    bool ok = true;
    std::string error;
};

template <typename Runner>
std::vector<SweepRow> sweep(const std::vector<std::map<std::string, double>>& grid,
                            Runner&& runner, const std::vector<std::uint64_t>& seeds) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
    std::vector<SweepRow> rows(grid.size() * seeds.size());
    std::vector<std::future<void>> tasks;
    tasks.reserve(rows.size());
    std::size_t r = 0;
    for (const auto& point : grid) {
        for (std::uint64_t seed : seeds) {
            SweepRow& row = rows[r++];
            row.params = point;
            row.seed = seed;
            tasks.push_back(std::async(std::launch::async, [&row, &point, &runner, seed]() {
                try {
                    row.metrics = runner(point, seed);
                } catch (const std::exception& e) {
                    row.ok = false;
                    row.error = e.what();
                }
            }));
        }
    }
    for (auto& t : tasks) t.get();
    return rows;
}

} // namespace autobm
