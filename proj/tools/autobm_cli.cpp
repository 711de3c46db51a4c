// autobm — command-line front end for the autonomous-learning circuit
// simulator. Subcommands: train, infer, oracle, sweep. All outputs are
// deterministic for a fixed seed: same command, same bytes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <autobm/autobm.hpp>

namespace fs = std::filesystem;

namespace {

fs::path resolve_out(const std::string& cli_out, const std::string& config_out,
                     const std::string& leaf) {
    if (!cli_out.empty()) return cli_out;
    if (!config_out.empty()) return config_out;
    const char* root = std::getenv("AUTOBM_OUT");
    return fs::path(root != nullptr ? root : "out") / leaf;
}

struct TrainArgs {
    std::string config;
    std::string out;
    std::int64_t seed = -1; // -1 = use the config's seed list
};

int do_train(const TrainArgs& a) {
    autobm::RunConfig cfg = autobm::RunConfig::load(a.config);
    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (a.seed >= 0) seeds = {static_cast<std::uint64_t>(a.seed)};
    const fs::path out = resolve_out(a.out, cfg.out_dir, cfg.experiment);
    fs::create_directories(out);

    if (!cfg.strict_timescales && cfg.circuit.timescale_ratio() < 100.0)
        std::cerr << "warning: timescale separation weak: tau_L/tau_N = "
                  << autobm::format_g17(cfg.circuit.timescale_ratio()) << " < 100\n";

    for (std::uint64_t seed : seeds) {
        const autobm::TrainResult res = autobm::run_config_seed(cfg, seed);
        const std::string tag = "_seed" + std::to_string(seed);
        autobm::write_kl_csv(out / ("kl" + tag + ".csv"), res.trajectory);
        autobm::write_snapshots_csv(out / ("snapshots" + tag + ".csv"), res.trajectory);
        autobm::save_weights(autobm::WeightSnapshotFile::from_weights(
                                 res.final_weights, cfg.effective_duration_ns(), cfg.digest),
                             out / ("weights" + tag + ".json"));
        autobm::write_summary_csv(
            out / ("summary" + tag + ".csv"),
            {{"final_kl_nats", res.final_kl},
             {"flip_count", static_cast<double>(res.trace.flips.size())},
             {"duration_ns", cfg.effective_duration_ns()},
             {"n", static_cast<double>(res.final_weights.size())},
             {"tau_l_ns", cfg.circuit.tau_l_ns()},
             {"tau_n_ns", cfg.circuit.tau_n_ns}});
        std::cout << "seed " << seed << ": final KL = " << autobm::format_g17(res.final_kl)
                  << '\n';
    }
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

struct InferArgs {
    std::string weights;
    std::string clamp;
    std::string out;
    double i0 = 1.0;
    double duration_ns = 100.0;
    double tau_n_ns = 0.1;
    std::uint64_t seed = 1;
    bool completion = false;
};

int do_infer(const InferArgs& a) {
    const autobm::WeightSnapshotFile snap = autobm::load_weights(a.weights);
    const autobm::WeightSet w = snap.to_weights();
    const fs::path out = resolve_out(a.out, "", "infer");
    fs::create_directories(out);

    if (a.completion) {
        if (w.size() != 15)
            throw autobm::ConfigError("--completion requires an N=15 snapshot, got N=" +
                                      std::to_string(w.size()));
        const autobm::CompletionReport rep =
            autobm::run_completion(w, autobm::DigitSet::canonical(), autobm::AnnealFactor(a.i0),
                                   a.duration_ns, a.seed, {a.tau_n_ns});
        autobm::write_completion_csv(out / "completion.csv", rep);
        std::cout << "completed " << rep.correct_count() << "/10 digits; wrote "
                  << (out / "completion.csv").string() << '\n';
        return 0;
    }

    autobm::ClampSpec clamp = autobm::parse_clamp(a.clamp);
    for (const auto& [idx, _] : clamp.pinned)
        if (idx >= w.size())
            throw autobm::ConfigError("clamp index " + std::to_string(idx) +
                                      " out of range for N=" + std::to_string(w.size()));
    const autobm::SimTrace trace = autobm::run_free(
        w, clamp, autobm::AnnealFactor(a.i0), a.duration_ns, {a.tau_n_ns}, a.seed);
    const autobm::Distribution h = autobm::histogram(trace, 0.0, a.duration_ns);
    autobm::write_histogram_csv(out / "histogram.csv", h);
    std::size_t top = 0;
    for (std::size_t k = 1; k < h.bins(); ++k)
        if (h[k] > h[top]) top = k;
    std::cout << "top state " << autobm::index_to_config(static_cast<std::uint32_t>(top), h.size()).bits()
              << " occupancy " << autobm::format_g17(h[top]) << "; wrote "
              << (out / "histogram.csv").string() << '\n';
    return 0;
}

struct OracleArgs {
    std::string weights;
    std::string ideal = "uniform";
    std::string out;
    double i0 = 1.0;
};

int do_oracle(const OracleArgs& a) {
    const autobm::WeightSnapshotFile snap = autobm::load_weights(a.weights);
    const autobm::WeightSet w = snap.to_weights();
    if (w.size() > autobm::kMaxEnumerationBits)
        throw autobm::ConfigError("oracle enumeration supports N <= " +
                                  std::to_string(autobm::kMaxEnumerationBits) + ", got N=" +
                                  std::to_string(w.size()));
    const fs::path out = resolve_out(a.out, "", "oracle");
    fs::create_directories(out);

    const autobm::Distribution exact = autobm::boltzmann_exact(w, autobm::AnnealFactor(a.i0));
    autobm::write_histogram_csv(out / "oracle.csv", exact, "probability");
    const autobm::Distribution ideal = autobm::named_ideal(a.ideal, w.size());
    const double kl = autobm::kl_divergence(ideal, exact, 0.0);
    autobm::write_summary_csv(out / "oracle_summary.csv",
                              {{"kl_nats", kl}, {"entropy_nats", exact.entropy()}, {"i0", a.i0}});
    std::cout << "KL(" << a.ideal << " || exact) = " << autobm::format_g17(kl)
              << ", entropy = " << autobm::format_g17(exact.entropy()) << " nats; wrote "
              << (out / "oracle.csv").string() << '\n';
    return 0;
}

struct SweepArgs {
    std::string config;
    std::string out;
};

// sweep config: {"experiment": "full_adder", "param": ..., "values": [...],
//                "seeds": [...], "duration_ns": optional}
int do_sweep(const SweepArgs& a) {
    std::ifstream in(a.config);
    if (!in) throw autobm::ConfigError("cannot open config file: " + a.config);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw autobm::ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw autobm::ConfigError("config root must be an object");
    autobm::detail::reject_unknown_keys(
        j, {"experiment", "param", "values", "seeds", "duration_ns", "out_dir"}, "sweep config");
    const std::string experiment = autobm::detail::get_string(j, "experiment", "full_adder");
    if (experiment != "full_adder")
        throw autobm::ConfigError("sweep supports experiment \"full_adder\" only");
    const std::string param = autobm::detail::get_string(j, "param", "");
    const bool known = param == "tau_n_ns" || param == "r_jitter_sigma" ||
                       param == "tau_n_jitter_sigma" || param == "duration_ns";
    if (!known)
        throw autobm::ConfigError("sweep param must be one of tau_n_ns, r_jitter_sigma, "
                                  "tau_n_jitter_sigma, duration_ns");
    if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty())
        throw autobm::ConfigError("key 'values' must be a non-empty array");
    std::vector<std::map<std::string, double>> grid;
    for (const auto& v : j.at("values")) {
        if (!v.is_number()) throw autobm::ConfigError("sweep values must be numbers");
        grid.push_back({{param, v.get<double>()}});
    }
    std::vector<std::uint64_t> seeds{1};
    if (j.contains("seeds")) {
        if (!j.at("seeds").is_array() || j.at("seeds").empty())
            throw autobm::ConfigError("key 'seeds' must be a non-empty array");
        seeds.clear();
        for (const auto& s : j.at("seeds")) {
            if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
                throw autobm::ConfigError("key 'seeds' must hold non-negative integers");
            seeds.push_back(s.get<std::uint64_t>());
        }
    }
    const double duration = autobm::detail::get_number(j, "duration_ns", 5500.0);
    if (!(duration > 0.0)) throw autobm::ConfigError("key 'duration_ns' must be > 0");

    const fs::path out =
        resolve_out(a.out, autobm::detail::get_string(j, "out_dir", ""), "sweep");
    fs::create_directories(out);

    auto runner = [&](const std::map<std::string, double>& point, std::uint64_t seed) {
        autobm::FullAdderOptions opts;
        opts.duration_ns = duration;
        if (auto it = point.find("tau_n_ns"); it != point.end()) opts.tau_n_ns = it->second;
        if (auto it = point.find("r_jitter_sigma"); it != point.end())
            opts.r_jitter_sigma = it->second;
        if (auto it = point.find("tau_n_jitter_sigma"); it != point.end())
            opts.tau_n_jitter_sigma = it->second;
        if (auto it = point.find("duration_ns"); it != point.end()) opts.duration_ns = it->second;
        const autobm::TrainResult res = autobm::run_full_adder(seed, opts);
        return std::map<std::string, double>{{"final_kl_nats", res.final_kl}};
    };
    const std::vector<autobm::SweepRow> rows = autobm::sweep(grid, runner, seeds);
    autobm::write_sweep_csv(out / "sweep.csv", rows);
    std::cout << "wrote " << (out / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"behavioral simulator of a clockless probabilistic learning circuit"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train weights from a run config");
    train->add_option("--config", train_args.config, "run config JSON")->required();
    train->add_option("--seed", train_args.seed, "override the config's seed list");
    train->add_option("--out", train_args.out, "output directory");

    InferArgs infer_args;
    CLI::App* infer = app.add_subcommand("infer", "sample a frozen weight snapshot");
    infer->add_option("--weights", infer_args.weights, "weight snapshot JSON")->required();
    infer->add_option("--clamp", infer_args.clamp, "comma-separated index=+-1 pins");
    infer->add_option("--i0", infer_args.i0, "anneal factor (inverse temperature)");
    infer->add_option("--duration-ns", infer_args.duration_ns, "simulated time");
    infer->add_option("--tau-n-ns", infer_args.tau_n_ns, "neuron update timescale");
    infer->add_option("--seed", infer_args.seed, "RNG seed");
    infer->add_option("--out", infer_args.out, "output directory");
    infer->add_flag("--completion", infer_args.completion,
                    "run the 10-digit completion report (N=15 snapshots)");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "exact Boltzmann distribution of a snapshot");
    oracle->add_option("--weights", oracle_args.weights, "weight snapshot JSON")->required();
    oracle->add_option("--i0", oracle_args.i0, "anneal factor");
    oracle->add_option("--ideal", oracle_args.ideal, "ideal distribution: uniform, full_adder, digits");
    oracle->add_option("--out", oracle_args.out, "output directory");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "grid x seed sweep of the full adder");
    sweep->add_option("--config", sweep_args.config, "sweep config JSON")->required();
    sweep->add_option("--out", sweep_args.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(train)) return do_train(train_args);
        if (app.got_subcommand(infer)) return do_infer(infer_args);
        if (app.got_subcommand(oracle)) return do_oracle(oracle_args);
        if (app.got_subcommand(sweep)) return do_sweep(sweep_args);
        return 1;
    } catch (const autobm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
