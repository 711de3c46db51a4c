#pragma once

// Continuous-time weight learning. Every unordered neuron pair (and every
// bias) owns one RC cell whose drive is the difference between the data-side
// correlator and the network-side XNOR correlator; between events both are
// constant, so the RC equation is solved exactly — no ODE-solver tolerance
// enters anywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"
#include "rng.hpp"

namespace autobm {

// Element values of the learning circuit. Defaults reproduce the reference
// hardware point: C=1 nF, R=5 kOhm, A_v=10, V_0=50 mV, V_DD=0.8 V.
struct CircuitParams {
    double r_ohm = 5000.0;
    double c_farad = 1e-9;
    double r_f_ohm = 1e6; // synapse feedback resistor; carried but unused here
    double a_v = 10.0;
    double v_0 = 0.05;
    double v_dd = 0.8;
    double tau_n_ns = 0.1;

    double lambda() const { return v_0 / (a_v * v_dd / 2.0); }
    double rc_ns() const { return r_ohm * c_farad * 1e9; }
    double tau_l_ns() const { return lambda() * rc_ns(); }
    double weight_scale() const { return a_v / v_0; } // W = weight_scale * V
    double timescale_ratio() const { return tau_l_ns() / tau_n_ns; }

    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!(x > 0.0))
                throw std::invalid_argument(std::string("CircuitParams: ") + name +
                                            " must be > 0");
        };
        positive(r_ohm, "r_ohm");
        positive(c_farad, "c_farad");
        positive(r_f_ohm, "r_f_ohm");
        positive(a_v, "a_v");
        positive(v_0, "v_0");
        positive(v_dd, "v_dd");
        positive(tau_n_ns, "tau_n_ns");
        const double l = lambda();
        if (!(l > 0.0 && l < 1.0))
            throw std::invalid_argument("CircuitParams: lambda must lie in (0,1)");
    }
};

struct CircuitMap {
    double lambda;
    double tau_l_ns;
    double weight_scale; // dimensionless weight per volt
};

inline CircuitMap map_circuit(const CircuitParams& p) {
    p.validate();
    return {p.lambda(), p.tau_l_ns(), p.weight_scale()};
}

enum class FeedMode { Averaged, Sequential };

// How training data drives the v-side of the correlators: either every
// vector at once (frequency-weighted average) or one vector at a time.
struct FeedSchedule {
    FeedMode mode = FeedMode::Averaged;
    double dwell_ns = 1.0; // per-vector presentation time (Sequential)
    TrainingSet training;

    static FeedSchedule averaged(TrainingSet ts) {
        return {FeedMode::Averaged, 1.0, std::move(ts)};
    }
    static FeedSchedule sequential(TrainingSet ts, double dwell_ns) {
        return {FeedMode::Sequential, dwell_ns, std::move(ts)};
    }

    void validate() const {
        if (mode == FeedMode::Sequential && !(dwell_ns > 0.0))
            throw std::invalid_argument("FeedSchedule: dwell_ns must be > 0");
    }

    int vector_at(double t) const {
        if (mode == FeedMode::Averaged) return -1;
        const double k = std::floor(t / dwell_ns);
        return static_cast<int>(std::fmod(k, static_cast<double>(training.size())));
    }
};

// Data-side drive of channel (i,j) at time t; i == j addresses the bias
// channel of neuron i.
inline double feed_value(const FeedSchedule& s, int i, int j, double t) {
    s.validate();
    if (t < 0.0) throw std::invalid_argument("feed_value: t must be >= 0");
    const int n = s.training.vector_length();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("feed_value: index out of range");
    if (s.mode == FeedMode::Averaged) {
        const Correlations c = average_correlations(s.training);
        return i == j ? c.site_mean(i) : c.pair_mean(i, j);
    }
    const BipolarVector& v = s.training.vector(s.vector_at(t));
    return i == j ? static_cast<double>(v[i]) : static_cast<double>(v[i] * v[j]);
}

// Exact step of C dv/dt = (drive - v)/R across dt with constant drive.
inline double rc_advance(double v_now, double drive, double rc_ns, double dt) {
    if (!(rc_ns > 0.0)) throw std::invalid_argument("rc_advance: rc_ns must be > 0");
    if (dt < 0.0) throw std::invalid_argument("rc_advance: dt must be >= 0");
    return v_now + (drive - v_now) * (-std::expm1(-dt / rc_ns));
}

// dW/dt = (v_corr - m_corr - lambda*w) / tau_l
inline double weight_derivative(double v_corr, double m_corr, double w, double lambda,
                                double tau_l_ns) {
    if (!(tau_l_ns > 0.0))
        throw std::invalid_argument("weight_derivative: tau_l_ns must be > 0");
    return (v_corr - m_corr - lambda * w) / tau_l_ns;
}

struct WeightTrajectory {
    struct Snapshot {
        double t_ns;
        WeightSet weights; // dimensionless readout, either integration domain
    };
    struct KlPoint {
        double t_ns; // window start; covers [t_ns, t_ns + window]
        double kl;
    };
    std::vector<Snapshot> snapshots;
    std::vector<KlPoint> kl_series;
    std::vector<std::string> warnings;
};

// Snapshot with the latest time <= t.
inline const WeightSet& freeze_for_inference(const WeightTrajectory& traj, double t) {
    if (traj.snapshots.empty() || t < traj.snapshots.front().t_ns)
        throw std::invalid_argument("freeze_for_inference: t before first snapshot");
    const WeightSet* best = nullptr;
    for (const auto& s : traj.snapshots) {
        if (s.t_ns <= t) best = &s.weights;
        else break;
    }
    return *best;
}

// Volts integrates Eq-(4)-style capacitor voltages and reads out W = A_v*V/V_0;
// Dimensionless integrates the scaled weights directly. Both use the same
// exponential factor, so trajectories agree to rounding error.
enum class TrainDomain { Dimensionless, Volts };

struct TrainOptions {
    double snapshot_every_ns = 500.0;
    double kl_window_ns = 500.0;
    double kl_stride_ns = 100.0;
    TrainDomain domain = TrainDomain::Dimensionless;
    bool learn_biases = true;
    TimingModel timing_model = TimingModel::Exponential;
    AnnealFactor i0{1.0};
    ClampSpec clamp;              // neurons pinned for the entire run
    double r_jitter_sigma = 0.0;  // log-normal sigma on per-channel R
    double tau_n_jitter_sigma = 0.0; // log-normal sigma on per-neuron tau_N
};

struct TrainResult {
    WeightTrajectory trajectory;
    SimTrace trace;        // network activity during training
    WeightSet final_weights{1};
    double final_kl = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> tau_n_ns; // effective per-neuron means (after jitter)
};

// Full 2^N distribution with the training frequencies at the encoded states.
inline Distribution ideal_distribution(const TrainingSet& ts) {
    const int n = ts.vector_length();
    std::vector<double> mass(std::size_t{1} << n, 0.0);
    for (int k = 0; k < ts.size(); ++k)
        mass[config_to_index(ts.vector(k))] += ts.frequency(k);
    return Distribution::from_unnormalized(n, std::move(mass));
}

// Co-simulation of the network and the weight RC cells. Weights advance
// exactly between events; events are neuron updates, sequential-feed
// boundaries, and snapshot times (ties processed in that order, reversed:
// feed first, then snapshot, then neuron).
inline TrainResult train_detailed(const WeightSet& w0, const FeedSchedule& sched,
                                  const CircuitParams& p, double duration_ns,
                                  const TrainOptions& opts, std::uint64_t seed) {
    p.validate();
    sched.validate();
    if (!(duration_ns > 0.0))
        throw std::invalid_argument("train: duration must be > 0");
    if (!(opts.snapshot_every_ns > 0.0) || !(opts.kl_window_ns > 0.0) ||
        !(opts.kl_stride_ns > 0.0))
        throw std::invalid_argument("train: snapshot/window/stride must be > 0");
    const int n = sched.training.vector_length();
    if (w0.size() != n)
        throw std::invalid_argument("train: weight/training dimension mismatch");
    opts.clamp.validate(n);

    TrainResult res;
    if (p.timescale_ratio() < 100.0)
        res.trajectory.warnings.push_back(
            "timescale separation weak: tau_L/tau_N = " +
            std::to_string(p.timescale_ratio()) + " < 100");

    const double lambda = p.lambda();
    const double rc = p.rc_ns();
    const double wscale = p.weight_scale();
    // steady-state scale of the drive: target = drive * drive_gain
    const double drive_gain =
        opts.domain == TrainDomain::Volts ? p.v_dd / 2.0 : 1.0 / lambda;
    const double readout =
        opts.domain == TrainDomain::Volts ? wscale : 1.0; // state -> dimensionless
    const int pairs = WeightSet::pair_count_of(n);

    RngStream rng(seed);

    // component jitter (drawn only when enabled, so sigma=0 runs are
    // unaffected by the draws); order: pair R, bias R, tau_N
    std::vector<double> inv_rc(static_cast<std::size_t>(pairs + n), 1.0 / rc);
    if (opts.r_jitter_sigma > 0.0)
        for (auto& x : inv_rc)
            x = 1.0 / (rc * std::exp(opts.r_jitter_sigma * rng.normal()));
    std::vector<double> tau(static_cast<std::size_t>(n), p.tau_n_ns);
    if (opts.tau_n_jitter_sigma > 0.0)
        for (auto& x : tau) x = p.tau_n_ns * std::exp(opts.tau_n_jitter_sigma * rng.normal());
    res.tau_n_ns = tau;
    const bool shared_rc = opts.r_jitter_sigma <= 0.0;

    // network state
    std::vector<std::int8_t> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (auto it = opts.clamp.pinned.find(i); it != opts.clamp.pinned.end())
            m[static_cast<std::size_t>(i)] = it->second;
        else
            m[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1 : -1;
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> next_t(static_cast<std::size_t>(n), inf);
    for (int i = 0; i < n; ++i) {
        if (opts.clamp.is_clamped(i)) continue;
        if (opts.timing_model == TimingModel::Fixed)
            next_t[static_cast<std::size_t>(i)] = rng.uniform01() * tau[static_cast<std::size_t>(i)];
        else
            next_t[static_cast<std::size_t>(i)] = rng.exponential(tau[static_cast<std::size_t>(i)]);
    }

    // data-side drives (per pair channel, then per bias channel)
    const Correlations avg = average_correlations(sched.training);
    std::vector<double> vpair(static_cast<std::size_t>(pairs));
    std::vector<double> vsite(static_cast<std::size_t>(n));
    int example = 0;
    auto load_feed = [&]() {
        if (sched.mode == FeedMode::Averaged) {
            int c = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j, ++c)
                    vpair[static_cast<std::size_t>(c)] = avg.pair_mean(i, j);
            for (int i = 0; i < n; ++i) vsite[static_cast<std::size_t>(i)] = avg.site_mean(i);
        } else {
            const BipolarVector& v = sched.training.vector(example);
            int c = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j, ++c)
                    vpair[static_cast<std::size_t>(c)] = v[i] * v[j];
            for (int i = 0; i < n; ++i) vsite[static_cast<std::size_t>(i)] = v[i];
        }
    };
    load_feed();

    // network-side correlators and the per-channel RC targets
    std::vector<double> mm(static_cast<std::size_t>(pairs));
    {
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++c)
                mm[static_cast<std::size_t>(c)] =
                    m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
    }
    std::vector<double> target_pair(static_cast<std::size_t>(pairs));
    std::vector<double> target_bias(static_cast<std::size_t>(n));
    auto refresh_targets = [&]() {
        for (int c = 0; c < pairs; ++c)
            target_pair[static_cast<std::size_t>(c)] =
                (vpair[static_cast<std::size_t>(c)] - mm[static_cast<std::size_t>(c)]) * drive_gain;
        for (int i = 0; i < n; ++i)
            target_bias[static_cast<std::size_t>(i)] =
                (vsite[static_cast<std::size_t>(i)] - m[static_cast<std::size_t>(i)]) * drive_gain;
    };
    refresh_targets();

    // RC cell state, in the integration domain
    std::vector<double> wstate(static_cast<std::size_t>(pairs));
    std::vector<double> bstate(static_cast<std::size_t>(n));
    for (int c = 0; c < pairs; ++c)
        wstate[static_cast<std::size_t>(c)] = w0.upper()[static_cast<std::size_t>(c)] / readout;
    for (int i = 0; i < n; ++i) bstate[static_cast<std::size_t>(i)] = w0.bias(i) / readout;

    auto advance = [&](double dt) {
        if (dt <= 0.0) return;
        if (shared_rc) {
            const double k = -std::expm1(-dt * inv_rc[0]);
            for (int c = 0; c < pairs; ++c)
                wstate[static_cast<std::size_t>(c)] +=
                    (target_pair[static_cast<std::size_t>(c)] - wstate[static_cast<std::size_t>(c)]) * k;
            if (opts.learn_biases)
                for (int i = 0; i < n; ++i)
                    bstate[static_cast<std::size_t>(i)] +=
                        (target_bias[static_cast<std::size_t>(i)] - bstate[static_cast<std::size_t>(i)]) * k;
        } else {
            for (int c = 0; c < pairs; ++c)
                wstate[static_cast<std::size_t>(c)] +=
                    (target_pair[static_cast<std::size_t>(c)] - wstate[static_cast<std::size_t>(c)]) *
                    (-std::expm1(-dt * inv_rc[static_cast<std::size_t>(c)]));
            if (opts.learn_biases)
                for (int i = 0; i < n; ++i)
                    bstate[static_cast<std::size_t>(i)] +=
                        (target_bias[static_cast<std::size_t>(i)] - bstate[static_cast<std::size_t>(i)]) *
                        (-std::expm1(-dt * inv_rc[static_cast<std::size_t>(pairs + i)]));
        }
    };

    auto record_snapshot = [&](double t) {
        WeightSet w(n);
        for (int c = 0; c < pairs; ++c)
            w.upper()[static_cast<std::size_t>(c)] = wstate[static_cast<std::size_t>(c)] * readout;
        for (int i = 0; i < n; ++i) w.set_bias(i, bstate[static_cast<std::size_t>(i)] * readout);
        res.trajectory.snapshots.push_back({t, std::move(w)});
    };

    auto input_of = [&](int i) {
        double acc = bstate[static_cast<std::size_t>(i)] * readout;
        for (int j = 0; j < n; ++j)
            if (j != i)
                acc += wstate[static_cast<std::size_t>(WeightSet::pair_index(n, i, j))] * readout *
                       m[static_cast<std::size_t>(j)];
        return opts.i0.value() * acc;
    };

    SimTrace& trace = res.trace;
    trace.n = n;
    trace.t_begin_ns = 0.0;
    trace.t_end_ns = duration_ns;
    trace.initial = BipolarVector(m);

    record_snapshot(0.0);
    double t_now = 0.0;
    double next_snap = opts.snapshot_every_ns;
    double next_feed = sched.mode == FeedMode::Sequential ? sched.dwell_ns : inf;

    while (true) {
        int who = -1;
        double t_neu = inf;
        for (int i = 0; i < n; ++i) {
            if (next_t[static_cast<std::size_t>(i)] < t_neu) {
                t_neu = next_t[static_cast<std::size_t>(i)];
                who = i;
            }
        }
        const double t_evt = std::min({next_feed, next_snap, t_neu});
        if (t_evt > duration_ns) break;
        advance(t_evt - t_now);
        t_now = t_evt;
        if (next_feed == t_evt) {
            example = (example + 1) % sched.training.size();
            load_feed();
            refresh_targets();
            next_feed += sched.dwell_ns;
        } else if (next_snap == t_evt) {
            record_snapshot(t_now);
            next_snap += opts.snapshot_every_ns;
        } else {
            const std::int8_t value = bsn_sample(input_of(who), rng);
            if (value != m[static_cast<std::size_t>(who)]) {
                m[static_cast<std::size_t>(who)] = value;
                trace.flips.push_back({t_now, who, value});
                for (int j = 0; j < n; ++j) {
                    if (j == who) continue;
                    const auto c = static_cast<std::size_t>(WeightSet::pair_index(n, who, j));
                    mm[c] = -mm[c];
                    target_pair[c] = (vpair[c] - mm[c]) * drive_gain;
                }
                target_bias[static_cast<std::size_t>(who)] =
                    (vsite[static_cast<std::size_t>(who)] - value) * drive_gain;
            }
            next_t[static_cast<std::size_t>(who)] =
                schedule_next(t_now, {tau[static_cast<std::size_t>(who)], opts.timing_model}, rng);
        }
    }
    advance(duration_ns - t_now);
    if (res.trajectory.snapshots.back().t_ns < duration_ns) record_snapshot(duration_ns);

    res.final_weights = res.trajectory.snapshots.back().weights;

    // windowed KL against the training distribution, smoothed by half a
    // pseudo-count of the expected number of neuron updates per window
    const Distribution ideal = ideal_distribution(sched.training);
    double updates = 0.0;
    for (int i = 0; i < n; ++i)
        if (!opts.clamp.is_clamped(i)) updates += opts.kl_window_ns / tau[static_cast<std::size_t>(i)];
    const double smoothing = updates > 0.0 ? 0.5 / updates : 0.0;
    for (double t = 0.0; t + opts.kl_window_ns <= duration_ns + 1e-9; t += opts.kl_stride_ns) {
        const double hi = std::min(t + opts.kl_window_ns, duration_ns);
        const Distribution h = histogram(trace, t, hi);
        res.trajectory.kl_series.push_back({t, kl_divergence(ideal, h, smoothing)});
    }
    if (!res.trajectory.kl_series.empty()) res.final_kl = res.trajectory.kl_series.back().kl;
    return res;
}

inline WeightTrajectory train(const WeightSet& w0, const FeedSchedule& sched,
                              const CircuitParams& p, double duration_ns,
                              double snapshot_every_ns, std::uint64_t seed) {
    TrainOptions opts;
    opts.snapshot_every_ns = snapshot_every_ns;
    return train_detailed(w0, sched, p, duration_ns, opts, seed).trajectory;
}

} // namespace autobm
