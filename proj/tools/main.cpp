#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pqs/artifacts.hpp"
#include "pqs/config.hpp"
#include "pqs/errors.hpp"
#include "pqs/estimator.hpp"
#include "pqs/experiments.hpp"
#include "pqs/record_io.hpp"
#include "pqs/rng.hpp"
#include "pqs/simulate.hpp"
#include "pqs/textio.hpp"
#include "pqs/version.hpp"

namespace fs = std::filesystem;

namespace {

int workers_from_env() {
    const char* env = std::getenv("PQS_WORKERS");
    if (!env || *env == '\0') return 0;
    const auto v = pqs::parse_int(env);
    if (!v || *v < 1) throw pqs::ConfigError("PQS_WORKERS must be a positive integer");
    return *v;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw pqs::IoError("cannot create output directory " + dir + ": " + ec.message());
}

struct CommonArgs {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

pqs::SimConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return pqs::SimConfig{};
    return pqs::load_sim_config(config_path);
}

int cmd_simulate(const CommonArgs& args, int n_records) {
    pqs::SimConfig config = pqs::load_sim_config(args.config_path);
    if (args.seed_given) config.seed = args.seed;
    if (config.injection && !config.injection->emission_probability)
        config.injection->emission_probability = pqs::kDefaultEmissionProbability;
    pqs::require_valid(config);
    ensure_dir(args.out);

    std::vector<std::string> names;
    for (int k = 0; k < n_records; ++k) {
        pqs::SimConfig one = config;
        one.seed = pqs::derive_seed(config.seed, static_cast<std::uint64_t>(k));
        const pqs::DetectionRecord record = pqs::simulate_record(one);
        char name[32];
        std::snprintf(name, sizeof(name), "record_%05d.txt", k);
        pqs::write_record(join_path(args.out, name), record);
        names.emplace_back(name);
    }

    pqs::RunManifest manifest;
    manifest.command = "simulate";
    manifest.config_hash = pqs::hex64(pqs::fnv1a64(pqs::sim_config_to_string(config)));
    manifest.root_seed = config.seed;
    manifest.artifact_paths = names;
    manifest.tool_version = pqs::kToolVersion;
    pqs::write_manifest(join_path(args.out, "manifest.json"), manifest);

    std::printf("wrote %d record(s) and manifest.json to %s\n", n_records, args.out.c_str());
    return 0;
}

int cmd_estimate(const std::string& record_path, const std::string& out_csv) {
    const std::string record_text = pqs::read_text_file(record_path);
    const pqs::DetectionRecord record = pqs::record_from_string(record_text, record_path);
    pqs::require_valid(record.model_snapshot);

    const pqs::SmoothedTrajectory traj = pqs::smooth(record.model_snapshot, record.samples);
    pqs::write_trajectory_csv(out_csv, traj);

    pqs::RunManifest manifest;
    manifest.command = "estimate";
    manifest.config_hash = pqs::hex64(pqs::fnv1a64(record_text));
    manifest.root_seed = record.seed;
    manifest.artifact_paths = {out_csv};
    manifest.tool_version = pqs::kToolVersion;
    pqs::write_manifest(out_csv + ".manifest.json", manifest);

    std::printf("estimated %zu samples -> %s\n", record.samples.size(), out_csv.c_str());
    return 0;
}

int cmd_experiment(const CommonArgs& args, int which, std::optional<int> realizations,
                   bool full_scale) {
    pqs::SimConfig config = load_or_default(args.config_path);
    if (args.config_path.empty()) {
        if (which == 1) {
            config.initial_state = pqs::InitialState::coherent(12.0);
            config.n_samples_total = 7000;
            config.injection.reset();
        } else {
            config.initial_state = pqs::InitialState::thermal();
            config.n_samples_total = 8001;
            pqs::InjectionSettings inj;
            inj.at_sample = 4000;
            config.injection = inj; // emission probability calibrated in the run
        }
    }
    if (args.seed_given) config.seed = args.seed;
    int n_runs = realizations.value_or(which == 1 ? (full_scale ? 6000 : 500)
                                                  : (full_scale ? 16320 : 4000));
    const int workers = workers_from_env();
    ensure_dir(args.out);

    pqs::RunManifest manifest;
    manifest.command = "experiment " + std::to_string(which);
    manifest.root_seed = config.seed;
    manifest.tool_version = pqs::kToolVersion;

    if (which == 1) {
        const pqs::EnsembleResult result = pqs::run_experiment1(config, n_runs, workers);
        pqs::write_experiment1_csv(join_path(args.out, "experiment1.csv"), result);
        pqs::write_experiment_sidecar(join_path(args.out, "experiment1.json"), result,
                                      config.seed, nullptr, nullptr);
        const std::string config_used = pqs::sim_config_to_string(config);
        pqs::atomic_write_file(join_path(args.out, "config_used.txt"), config_used);
        manifest.config_hash = pqs::hex64(pqs::fnv1a64(config_used));
        manifest.artifact_paths = {"experiment1.csv", "experiment1.json", "config_used.txt"};
        pqs::write_manifest(join_path(args.out, "manifest.json"), manifest);
        std::printf("experiment 1: %d realizations (%d failed)\n", result.n_realizations,
                    static_cast<int>(result.failures.size()));
    } else {
        const pqs::JumpWindow window;
        pqs::EnsembleResult result = pqs::run_experiment2(config, n_runs, workers, window);
        const pqs::ExpFit fit =
            pqs::fit_exponential(result.times, result.avg_mean_pqs, pqs::kFitWindowStart);
        pqs::write_experiment2_csv(join_path(args.out, "experiment2.csv"), result, fit);
        pqs::write_experiment_sidecar(join_path(args.out, "experiment2.json"), result,
                                      config.seed, &fit, &window);
        if (config.injection && !config.injection->emission_probability)
            config.injection->emission_probability = result.emission_probability;
        const std::string config_used = pqs::sim_config_to_string(config);
        pqs::atomic_write_file(join_path(args.out, "config_used.txt"), config_used);
        manifest.config_hash = pqs::hex64(pqs::fnv1a64(config_used));
        manifest.artifact_paths = {"experiment2.csv", "experiment2.json", "config_used.txt"};
        pqs::write_manifest(join_path(args.out, "manifest.json"), manifest);
        const pqs::JumpStats st = pqs::jump_stats(result.jump_times_pqs);
        std::printf("experiment 2: %d/%d selected (fraction %.4f, emission %.4f)\n",
                    result.n_realizations, result.n_simulated, result.selection_fraction,
                    result.emission_probability);
        std::printf("  jump-time std %.3f ms over %d crossings; fit tau %.1f ms, offset %.3f, "
                    "amplitude %.3f\n",
                    st.stddev * 1e3, st.count, fit.decay_time * 1e3, fit.offset, fit.amplitude);
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"monitor and retrodict the photon number of a decaying cavity"};
    app.set_version_flag("--version", pqs::kToolVersion);
    app.require_subcommand(1);

    CommonArgs sim_args;
    int n_records = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic detection records");
    simulate->add_option("--config", sim_args.config_path, "config file")->required();
    simulate->add_option("--out", sim_args.out, "output directory")->required();
    simulate->add_option("--records", n_records, "number of records")
        ->check(CLI::NonNegativeNumber);
    auto* sim_seed = simulate->add_option("--seed", sim_args.seed, "root seed override");

    std::string record_path, estimate_out;
    CLI::App* estimate =
        app.add_subcommand("estimate", "run the three analyses over one record");
    estimate->add_option("--record", record_path, "record file")->required();
    estimate->add_option("--out", estimate_out, "output CSV path")->required();

    CommonArgs exp_args;
    int which = 0;
    std::optional<int> realizations;
    bool full_scale = false;
    CLI::App* experiment = app.add_subcommand("experiment", "run an ensemble experiment");
    experiment->add_option("--which", which, "1 = free decay, 2 = injected jump")
        ->required()
        ->check(CLI::Range(1, 2));
    experiment->add_option("--config", exp_args.config_path, "config file (defaults per experiment)");
    experiment->add_option("--out", exp_args.out, "output directory")->required();
    experiment->add_option("--realizations", realizations, "simulated runs");
    auto* exp_seed = experiment->add_option("--seed", exp_args.seed, "root seed override");
    experiment->add_flag("--full-scale", full_scale, "full-sized ensembles (slow)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // prints help or the usage error; fold CLI11's exit codes into the
        // validation class
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (simulate->parsed()) {
        sim_args.seed_given = sim_seed->count() > 0;
        return cmd_simulate(sim_args, n_records);
    }
    if (estimate->parsed()) return cmd_estimate(record_path, estimate_out);
    exp_args.seed_given = exp_seed->count() > 0;
    return cmd_experiment(exp_args, which, realizations, full_scale);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const pqs::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const pqs::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const pqs::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
