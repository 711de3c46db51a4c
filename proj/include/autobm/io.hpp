#pragma once

// Operational surface: run configuration files (strict JSON), weight
// snapshot persistence, and CSV export of every time series the simulator
// produces. All numeric text is emitted with round-trip precision so equal
// runs yield byte-identical artifacts.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "learning.hpp"

namespace autobm {

// configuration/usage problems; the CLI maps these to exit code 1
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& scope) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + scope);
}

inline double get_number(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline bool get_bool(const nlohmann::json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean())
        throw ConfigError("key '" + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& key,
                              const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string())
        throw ConfigError("key '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

// FNV-1a over the canonical dump; identifies the originating config
inline std::string digest_of(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace detail

struct JitterConfig {
    double r_sigma = 0.0;
    double tau_n_sigma = 0.0;
};

// One training run, as loaded from a config file. Everything except
// `experiment` has a default; unknown keys are rejected.
struct RunConfig {
    std::string experiment; // "full_adder" or "digits"
    CircuitParams circuit;
    FeedMode feed_mode = FeedMode::Averaged;
    double dwell_ns = 1.0;
    double duration_ns = 0.0; // 0 = experiment default
    double snapshot_every_ns = 500.0;
    double kl_window_ns = 500.0;
    double kl_stride_ns = 100.0;
    TimingModel timing_model = TimingModel::Exponential;
    TrainDomain domain = TrainDomain::Dimensionless;
    std::vector<std::uint64_t> seeds{1};
    JitterConfig jitter;
    bool strict_timescales = false;
    std::string out_dir;
    std::string digest; // of the parsed file's canonical dump

    double effective_duration_ns() const {
        if (duration_ns > 0.0) return duration_ns;
        return experiment == "digits" ? 3000.0 : 5500.0;
    }

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
};

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown_keys(j,
                                {"experiment", "circuit", "feed", "duration_ns",
                                 "snapshot_every_ns", "kl_window_ns", "kl_stride_ns",
                                 "timing_model", "domain", "seeds", "jitter",
                                 "strict_timescales", "out_dir"},
                                "config");
    RunConfig c;
    c.experiment = detail::get_string(j, "experiment", "");
    if (c.experiment != "full_adder" && c.experiment != "digits")
        throw ConfigError("key 'experiment' must be \"full_adder\" or \"digits\"");

    if (j.contains("circuit")) {
        const auto& jc = j.at("circuit");
        if (!jc.is_object()) throw ConfigError("key 'circuit' must be an object");
        detail::reject_unknown_keys(
            jc, {"r_ohm", "c_farad", "r_f_ohm", "a_v", "v_0", "v_dd", "tau_n_ns"}, "circuit");
        c.circuit.r_ohm = detail::get_number(jc, "r_ohm", c.circuit.r_ohm);
        c.circuit.c_farad = detail::get_number(jc, "c_farad", c.circuit.c_farad);
        c.circuit.r_f_ohm = detail::get_number(jc, "r_f_ohm", c.circuit.r_f_ohm);
        c.circuit.a_v = detail::get_number(jc, "a_v", c.circuit.a_v);
        c.circuit.v_0 = detail::get_number(jc, "v_0", c.circuit.v_0);
        c.circuit.v_dd = detail::get_number(jc, "v_dd", c.circuit.v_dd);
        c.circuit.tau_n_ns = detail::get_number(jc, "tau_n_ns", c.circuit.tau_n_ns);
    }
    try {
        c.circuit.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what()); // config problem, not an internal error
    }

    if (j.contains("feed")) {
        const auto& jf = j.at("feed");
        if (!jf.is_object()) throw ConfigError("key 'feed' must be an object");
        detail::reject_unknown_keys(jf, {"mode", "dwell_ns"}, "feed");
        const std::string mode = detail::get_string(jf, "mode", "averaged");
        if (mode == "averaged")
            c.feed_mode = FeedMode::Averaged;
        else if (mode == "sequential")
            c.feed_mode = FeedMode::Sequential;
        else
            throw ConfigError("feed.mode must be \"averaged\" or \"sequential\"");
        c.dwell_ns = detail::get_number(jf, "dwell_ns", c.dwell_ns);
        if (c.feed_mode == FeedMode::Sequential && !(c.dwell_ns > 0.0))
            throw ConfigError("feed.dwell_ns must be > 0");
    }

    c.duration_ns = detail::get_number(j, "duration_ns", c.duration_ns);
    if (j.contains("duration_ns") && !(c.duration_ns > 0.0))
        throw ConfigError("key 'duration_ns' must be > 0");
    c.snapshot_every_ns = detail::get_number(j, "snapshot_every_ns", c.snapshot_every_ns);
    c.kl_window_ns = detail::get_number(j, "kl_window_ns", c.kl_window_ns);
    c.kl_stride_ns = detail::get_number(j, "kl_stride_ns", c.kl_stride_ns);
    if (!(c.snapshot_every_ns > 0.0) || !(c.kl_window_ns > 0.0) || !(c.kl_stride_ns > 0.0))
        throw ConfigError("snapshot_every_ns, kl_window_ns, kl_stride_ns must be > 0");

    const std::string timing = detail::get_string(j, "timing_model", "exponential");
    if (timing == "exponential")
        c.timing_model = TimingModel::Exponential;
    else if (timing == "fixed")
        c.timing_model = TimingModel::Fixed;
    else
        throw ConfigError("key 'timing_model' must be \"exponential\" or \"fixed\"");

    const std::string domain = detail::get_string(j, "domain", "dimensionless");
    if (domain == "dimensionless")
        c.domain = TrainDomain::Dimensionless;
    else if (domain == "volts")
        c.domain = TrainDomain::Volts;
    else
        throw ConfigError("key 'domain' must be \"dimensionless\" or \"volts\"");

    if (j.contains("seeds")) {
        if (!j.at("seeds").is_array() || j.at("seeds").empty())
            throw ConfigError("key 'seeds' must be a non-empty array");
        c.seeds.clear();
        for (const auto& s : j.at("seeds")) {
            if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
                throw ConfigError("key 'seeds' must hold non-negative integers");
            c.seeds.push_back(s.get<std::uint64_t>());
        }
    }

    if (j.contains("jitter")) {
        const auto& jj = j.at("jitter");
        if (!jj.is_object()) throw ConfigError("key 'jitter' must be an object");
        detail::reject_unknown_keys(jj, {"r_sigma", "tau_n_sigma"}, "jitter");
        c.jitter.r_sigma = detail::get_number(jj, "r_sigma", 0.0);
        c.jitter.tau_n_sigma = detail::get_number(jj, "tau_n_sigma", 0.0);
        if (c.jitter.r_sigma < 0.0 || c.jitter.tau_n_sigma < 0.0)
            throw ConfigError("jitter sigmas must be >= 0");
    }

    c.strict_timescales = detail::get_bool(j, "strict_timescales", false);
    if (c.strict_timescales && c.circuit.timescale_ratio() < 100.0)
        throw ConfigError("timescale separation violated: tau_L/tau_N = " +
                          format_g17(c.circuit.timescale_ratio()) + " < 100");
    c.out_dir = detail::get_string(j, "out_dir", "");
    c.digest = detail::digest_of(j.dump());
    return c;
}

inline RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

// Runs one seed of the configured experiment.
inline TrainResult run_config_seed(const RunConfig& c, std::uint64_t seed) {
    const TrainingSet ts =
        c.experiment == "digits" ? DigitSet::canonical().training() : full_adder_set();
    const FeedSchedule sched = c.feed_mode == FeedMode::Averaged
                                   ? FeedSchedule::averaged(ts)
                                   : FeedSchedule::sequential(ts, c.dwell_ns);
    TrainOptions opts;
    opts.snapshot_every_ns = c.snapshot_every_ns;
    opts.kl_window_ns = c.kl_window_ns;
    opts.kl_stride_ns = c.kl_stride_ns;
    opts.domain = c.domain;
    opts.learn_biases = c.experiment == "digits";
    opts.timing_model = c.timing_model;
    opts.r_jitter_sigma = c.jitter.r_sigma;
    opts.tau_n_jitter_sigma = c.jitter.tau_n_sigma;
    return train_detailed(WeightSet::zeros(ts.vector_length()), sched, c.circuit,
                          c.effective_duration_ns(), opts, seed);
}

// ---- weight snapshot files ----

struct WeightSnapshotFile {
    int schema_version = 1;
    int n = 0;
    std::vector<double> weights_upper;
    std::vector<double> biases;
    std::string config_digest;
    double time_ns = 0.0;

    static WeightSnapshotFile from_weights(const WeightSet& w, double time_ns,
                                           std::string digest) {
        WeightSnapshotFile f;
        f.n = w.size();
        f.weights_upper.assign(w.upper().begin(), w.upper().end());
        f.biases.assign(w.biases().begin(), w.biases().end());
        f.config_digest = std::move(digest);
        f.time_ns = time_ns;
        return f;
    }

    WeightSet to_weights() const {
        WeightSet w(n);
        std::copy(weights_upper.begin(), weights_upper.end(), w.upper().begin());
        for (int i = 0; i < n; ++i) w.set_bias(i, biases[static_cast<std::size_t>(i)]);
        return w;
    }
};

inline void save_weights(const WeightSnapshotFile& f, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema_version"] = f.schema_version;
    j["n"] = f.n;
    j["weights_upper"] = f.weights_upper;
    j["biases"] = f.biases;
    j["config_digest"] = f.config_digest;
    j["time_ns"] = f.time_ns;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snapshot file: " + path.string());
    out << j.dump(2) << '\n';
}

inline WeightSnapshotFile load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("corrupt snapshot file: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("corrupt snapshot file: root must be an object");
    detail::reject_unknown_keys(
        j, {"schema_version", "n", "weights_upper", "biases", "config_digest", "time_ns"},
        "snapshot");
    for (const char* key : {"schema_version", "n", "weights_upper", "biases", "time_ns"})
        if (!j.contains(key))
            throw ConfigError(std::string("corrupt snapshot file: missing key '") + key + "'");
    WeightSnapshotFile f;
    f.schema_version = j.at("schema_version").get<int>();
    if (f.schema_version != 1)
        throw ConfigError("unsupported snapshot schema version " +
                          std::to_string(f.schema_version));
    f.n = j.at("n").get<int>();
    if (f.n < 1) throw ConfigError("snapshot: n must be >= 1");
    f.weights_upper = j.at("weights_upper").get<std::vector<double>>();
    f.biases = j.at("biases").get<std::vector<double>>();
    if (static_cast<int>(f.weights_upper.size()) != WeightSet::pair_count_of(f.n) ||
        static_cast<int>(f.biases.size()) != f.n)
        throw ConfigError("snapshot: triangle/bias length does not match n");
    f.config_digest = detail::get_string(j, "config_digest", "");
    f.time_ns = j.at("time_ns").get<double>();
    return f;
}

// ---- CSV export ----

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // '\n' endings on all platforms
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

} // namespace detail

inline void write_kl_csv(const std::filesystem::path& path, const WeightTrajectory& traj) {
    auto out = detail::open_csv(path);
    out << "t_ns,kl_nats\n";
    for (const auto& p : traj.kl_series)
        out << format_g17(p.t_ns) << ',' << format_g17(p.kl) << '\n';
}

inline void write_snapshots_csv(const std::filesystem::path& path,
                                const WeightTrajectory& traj) {
    if (traj.snapshots.empty()) throw std::invalid_argument("write_snapshots_csv: no snapshots");
    const int n = traj.snapshots.front().weights.size();
    auto out = detail::open_csv(path);
    out << "t_ns";
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out << ",w_" << i << '_' << j << "_dimensionless";
    for (int i = 0; i < n; ++i) out << ",b_" << i << "_dimensionless";
    out << '\n';
    for (const auto& s : traj.snapshots) {
        out << format_g17(s.t_ns);
        for (double w : s.weights.upper()) out << ',' << format_g17(w);
        for (double b : s.weights.biases()) out << ',' << format_g17(b);
        out << '\n';
    }
}

// occupancy-sorted (descending, index ascending on ties)
inline void write_histogram_csv(const std::filesystem::path& path, const Distribution& d,
                                const char* value_header = "occupancy_fraction") {
    auto out = detail::open_csv(path);
    std::vector<std::size_t> order(d.bins());
    for (std::size_t k = 0; k < d.bins(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    out << "config_index,state_bits," << value_header << '\n';
    for (std::size_t k : order)
        out << k << ',' << index_to_config(static_cast<std::uint32_t>(k), d.size()).bits() << ','
            << format_g17(d[k]) << '\n';
}

inline void write_completion_csv(const std::filesystem::path& path,
                                 const CompletionReport& rep) {
    auto out = detail::open_csv(path);
    out << "digit,match,correct_occupancy_fraction,majority_bits\n";
    for (const auto& r : rep.rows)
        out << r.digit << ',' << (r.match ? 1 : 0) << ',' << format_g17(r.correct_occupancy)
            << ',' << r.majority.bits() << '\n';
}

inline void write_summary_csv(const std::filesystem::path& path,
                              const std::vector<std::pair<std::string, double>>& metrics) {
    auto out = detail::open_csv(path);
    out << "metric,value\n";
    for (const auto& [k, v] : metrics) out << k << ',' << format_g17(v) << '\n';
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<SweepRow>& rows) {
    auto out = detail::open_csv(path);
    std::set<std::string> params, metrics;
    for (const auto& r : rows) {
        for (const auto& [k, _] : r.params) params.insert(k);
        for (const auto& [k, _] : r.metrics) metrics.insert(k);
    }
    out << "seed";
    for (const auto& k : params) out << ',' << k;
    for (const auto& k : metrics) out << ',' << k;
    out << ",ok,error\n";
    for (const auto& r : rows) {
        out << r.seed;
        for (const auto& k : params) {
            auto it = r.params.find(k);
            out << ',' << (it == r.params.end() ? "" : format_g17(it->second));
        }
        for (const auto& k : metrics) {
            auto it = r.metrics.find(k);
            out << ',' << (it == r.metrics.end() ? "" : format_g17(it->second));
        }
        out << ',' << (r.ok ? 1 : 0) << ',' << r.error << '\n';
    }
}

// "0=1,3=-1" -> ClampSpec pinning those neurons
inline ClampSpec parse_clamp(const std::string& text) {
    ClampSpec c;
    if (text.empty()) return c;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("clamp entry '" + tok + "' is not index=value");
        int idx = 0, val = 0;
        try {
            idx = std::stoi(tok.substr(0, eq));
            val = std::stoi(tok.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("clamp entry '" + tok + "' is not index=value");
        }
        if (val != 1 && val != -1)
            throw ConfigError("clamp value for index " + std::to_string(idx) +
                              " must be 1 or -1");
        if (idx < 0) throw ConfigError("clamp index must be >= 0");
        if (c.pinned.count(idx))
            throw ConfigError("clamp index " + std::to_string(idx) + " repeated");
        c.pinned[idx] = static_cast<std::int8_t>(val);
    }
    return c;
}

// named ideal distribution for oracle comparisons
inline Distribution named_ideal(const std::string& name, int n) {
    if (name == "uniform") return Distribution::uniform(n);
    if (name == "full_adder") {
        if (n != 5) throw ConfigError("ideal 'full_adder' requires N=5, snapshot has N=" +
                                      std::to_string(n));
        return ideal_distribution(full_adder_set());
    }
    if (name == "digits") {
        if (n != 15) throw ConfigError("ideal 'digits' requires N=15, snapshot has N=" +
                                       std::to_string(n));
        return ideal_distribution(DigitSet::canonical().training());
    }
    throw ConfigError("unknown ideal distribution '" + name +
                      "' (expected uniform, full_adder, or digits)");
}

} // namespace autobm
