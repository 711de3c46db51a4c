#pragma once

// The autonomous, clockless network simulator. Each neuron refreshes on its
// own random clock; the synapse is recomputed instantaneously on every flip
// (an optional delay makes inputs stale to study violations of the
// neuron-slower-than-synapse condition). Produces flip traces from which
// occupancy histograms are taken.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace autobm {

enum class TimingModel { Exponential, Fixed };

struct NeuronTiming {
    double tau_n_ns = 0.1; // mean update interval
    TimingModel model = TimingModel::Exponential;

    void validate() const {
        if (!(tau_n_ns > 0.0))
            throw std::invalid_argument("NeuronTiming: tau_n_ns must be > 0");
    }
};

// Neurons held at fixed values during a run; they are never rescheduled.
struct ClampSpec {
    std::map<int, std::int8_t> pinned;

    static ClampSpec none() { return {}; }

    static ClampSpec pin_all(const BipolarVector& v) {
        ClampSpec c;
        for (int i = 0; i < v.size(); ++i) c.pinned[i] = v[i];
        return c;
    }

    bool is_clamped(int i) const { return pinned.count(i) != 0; }

    void validate(int n) const {
        for (const auto& [idx, val] : pinned) {
            if (idx < 0 || idx >= n)
                throw std::invalid_argument("ClampSpec: index out of range");
            if (val != -1 && val != 1)
                throw std::invalid_argument("ClampSpec: value must be -1 or +1");
        }
    }
};

// Flip record plus the initial configuration; occupancy between consecutive
// flips is implied by the event times.
struct SimTrace {
    struct Flip {
        double t_ns;
        std::int32_t neuron;
        std::int8_t value;
    };

    int n = 0;
    double t_begin_ns = 0.0;
    double t_end_ns = 0.0;
    BipolarVector initial{std::vector<std::int8_t>{1}};
    std::vector<Flip> flips;
};

// m = sgn(tanh(input) - r); ties resolve to +1
inline std::int8_t bsn_output(double input, double r) {
    return std::tanh(input) - r >= 0.0 ? 1 : -1;
}

// Draws r uniform on [-1,1); P(+1) = (1 + tanh(input)) / 2
inline std::int8_t bsn_sample(double input, RngStream& rng) {
    return bsn_output(input, rng.uniform_pm1());
}

// I_i = i0 * (sum_j W_ij m_j + b_i) for every neuron
inline std::vector<double> synapse_eval(const WeightSet& w, const BipolarVector& m,
                                        AnnealFactor i0) {
    const int n = w.size();
    if (m.size() != n)
        throw std::invalid_argument("synapse_eval: dimension mismatch");
    std::vector<double> inputs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double acc = w.bias(i);
        for (int j = 0; j < n; ++j)
            if (j != i) acc += w.weight(i, j) * m[j];
        inputs[static_cast<std::size_t>(i)] = i0.value() * acc;
    }
    return inputs;
}

// Next update time for one neuron. Exponential gaps model free-running
// retention times; the fixed model advances by exactly tau_n.
inline double schedule_next(double t_now, const NeuronTiming& timing, RngStream& rng) {
    timing.validate();
    if (timing.model == TimingModel::Fixed) return t_now + timing.tau_n_ns;
    return t_now + rng.exponential(timing.tau_n_ns);
}

struct FreeRunOptions {
    AnnealFactor i0{1.0};
    double duration_ns = 0.0;
    NeuronTiming timing{};
    std::vector<double> tau_n_scale; // optional per-neuron multipliers
    double synapse_delay_ns = 0.0;   // 0 = instantaneous synapse
};

// Event loop: pop the earliest neuron update, resample that neuron from its
// current synapse input, reschedule it. Deterministic given the seed.
inline SimTrace run_free(const WeightSet& w, const ClampSpec& clamp,
                         const FreeRunOptions& opts, std::uint64_t seed) {
    const int n = w.size();
    clamp.validate(n);
    opts.timing.validate();
    if (!(opts.duration_ns > 0.0))
        throw std::invalid_argument("run_free: duration must be > 0");
    if (!opts.tau_n_scale.empty() && static_cast<int>(opts.tau_n_scale.size()) != n)
        throw std::invalid_argument("run_free: tau_n_scale size mismatch");
    if (opts.synapse_delay_ns < 0.0)
        throw std::invalid_argument("run_free: synapse delay must be >= 0");

    RngStream rng(seed);
    const double inf = std::numeric_limits<double>::infinity();

    auto tau_of = [&](int i) {
        const double scale = opts.tau_n_scale.empty() ? 1.0 : opts.tau_n_scale[static_cast<std::size_t>(i)];
        return NeuronTiming{opts.timing.tau_n_ns * scale, opts.timing.model};
    };

    std::vector<std::int8_t> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (auto it = clamp.pinned.find(i); it != clamp.pinned.end())
            m[static_cast<std::size_t>(i)] = it->second;
        else
            m[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1 : -1;
    }

    std::vector<double> next_t(static_cast<std::size_t>(n), inf);
    for (int i = 0; i < n; ++i) {
        if (clamp.is_clamped(i)) continue;
        const NeuronTiming timing = tau_of(i);
        if (timing.model == TimingModel::Fixed)
            next_t[static_cast<std::size_t>(i)] = rng.uniform01() * timing.tau_n_ns; // phase
        else
            next_t[static_cast<std::size_t>(i)] = rng.exponential(timing.tau_n_ns);
    }

    SimTrace trace;
    trace.n = n;
    trace.t_begin_ns = 0.0;
    trace.t_end_ns = opts.duration_ns;
    trace.initial = BipolarVector(m);

    // Synapse view; lags the true state by the configured delay.
    std::vector<std::int8_t> view = m;
    std::size_t applied = 0; // flips already folded into `view`

    auto input_of = [&](int i, double t) {
        if (opts.synapse_delay_ns > 0.0) {
            const double horizon = t - opts.synapse_delay_ns;
            while (applied < trace.flips.size() && trace.flips[applied].t_ns <= horizon) {
                const auto& f = trace.flips[applied];
                view[static_cast<std::size_t>(f.neuron)] = f.value;
                ++applied;
            }
        }
        const std::vector<std::int8_t>& s = opts.synapse_delay_ns > 0.0 ? view : m;
        double acc = w.bias(i);
        for (int j = 0; j < n; ++j)
            if (j != i) acc += w.weight(i, j) * s[static_cast<std::size_t>(j)];
        return opts.i0.value() * acc;
    };

    while (true) {
        int who = -1;
        double t = inf;
        for (int i = 0; i < n; ++i) {
            if (next_t[static_cast<std::size_t>(i)] < t) {
                t = next_t[static_cast<std::size_t>(i)];
                who = i;
            }
        }
        if (who < 0 || t > opts.duration_ns) break;
        const std::int8_t value = bsn_sample(input_of(who, t), rng);
        if (value != m[static_cast<std::size_t>(who)]) {
            m[static_cast<std::size_t>(who)] = value;
            trace.flips.push_back({t, who, value});
        }
        next_t[static_cast<std::size_t>(who)] = schedule_next(t, tau_of(who), rng);
    }
    return trace;
}

inline SimTrace run_free(const WeightSet& w, const ClampSpec& clamp, AnnealFactor i0,
                         double duration_ns, const NeuronTiming& timing, std::uint64_t seed) {
    FreeRunOptions opts;
    opts.i0 = i0;
    opts.duration_ns = duration_ns;
    opts.timing = timing;
    return run_free(w, clamp, opts, seed);
}

// Time-weighted occupancy of each configuration over [t_start, t_end].
inline Distribution histogram(const SimTrace& trace, double t_start, double t_end) {
    if (!(t_start < t_end))
        throw std::invalid_argument("histogram: empty interval");
    if (t_start < trace.t_begin_ns - 1e-9 || t_end > trace.t_end_ns + 1e-9)
        throw std::invalid_argument("histogram: interval outside trace extent");
    const int n = trace.n;
    std::vector<double> occupancy(std::size_t{1} << n, 0.0);

    std::uint32_t cfg = config_to_index(trace.initial);
    double seg_start = trace.t_begin_ns;
    auto account = [&](double a, double b) {
        const double lo = std::max(a, t_start);
        const double hi = std::min(b, t_end);
        if (hi > lo) occupancy[cfg] += hi - lo;
    };
    for (const auto& f : trace.flips) {
        account(seg_start, f.t_ns);
        const int shift = n - 1 - f.neuron;
        if (f.value > 0)
            cfg |= (1u << shift);
        else
            cfg &= ~(1u << shift);
        seg_start = f.t_ns;
        if (seg_start >= t_end) break;
    }
    account(seg_start, trace.t_end_ns);
    return Distribution::from_unnormalized(n, std::move(occupancy));
}

// Time-weighted <m_i m_j> and <m_i> over a window, via the full histogram.
inline Correlations window_moments(const SimTrace& trace, double t_start, double t_end) {
    const Distribution occ = histogram(trace, t_start, t_end);
    const int n = trace.n;
    Correlations c;
    c.n = n;
    c.pair.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.site.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < occ.bins(); ++k) {
        const double p = occ[k];
        if (p == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const double si = ((k >> (n - 1 - i)) & 1u) ? 1.0 : -1.0;
            c.site[static_cast<std::size_t>(i)] += p * si;
            for (int j = 0; j < n; ++j) {
                const double sj = ((k >> (n - 1 - j)) & 1u) ? 1.0 : -1.0;
                c.pair[static_cast<std::size_t>(i * n + j)] += p * si * sj;
            }
        }
    }
    return c;
}

} // namespace autobm
