#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "pqs/config.hpp"
#include "pqs/textio.hpp"

using namespace pqs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("pqs_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string cli_path() {
    const char* env = std::getenv("PQS_CLI_PATH");
    REQUIRE_MESSAGE(env != nullptr, "PQS_CLI_PATH must point at the built binary");
    return env;
}

// exit code of the tool; stdout/stderr are discarded
int run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::string> file_lines(const std::string& path) {
    const std::string text = read_text_file(path); // keep the buffer alive for the views
    std::vector<std::string> out;
    for (const auto v : split(text, '\n')) out.emplace_back(v);
    return out;
}

} // namespace

TEST_CASE("version and usage") {
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 1);                  // a subcommand is required
    CHECK(run_cli("frobnicate") == 1);        // unknown subcommand
    CHECK(run_cli("simulate") == 1);          // missing required options
    CHECK(run_cli("experiment --which 3 --out /tmp/x") == 1);
}

TEST_CASE("simulate writes deterministic records and a manifest") {
    TempDir dir;
    atomic_write_file(dir.file("sim.cfg"), "n_samples 300\nseed 9\n");

    const std::string d1 = dir.file("run1");
    const std::string d2 = dir.file("run2");
    CHECK(run_cli("simulate --config " + dir.file("sim.cfg") + " --out " + d1 + " --records 2") ==
          0);
    CHECK(run_cli("simulate --config " + dir.file("sim.cfg") + " --out " + d2 + " --records 2") ==
          0);

    const std::string rec0 = read_text_file(d1 + "/record_00000.txt");
    CHECK(rec0 == read_text_file(d2 + "/record_00000.txt"));
    CHECK(rec0 != read_text_file(d1 + "/record_00001.txt"));

    const auto manifest = nlohmann::json::parse(read_text_file(d1 + "/manifest.json"));
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("root_seed") == 9);
    REQUIRE(manifest.at("artifacts").size() == 2);
    CHECK(manifest.at("artifacts")[0] == "record_00000.txt");

    // a seed override changes the output and is recorded
    const std::string d3 = dir.file("run3");
    CHECK(run_cli("simulate --config " + dir.file("sim.cfg") + " --out " + d3 +
                  " --records 1 --seed 10") == 0);
    CHECK(read_text_file(d3 + "/record_00000.txt") != rec0);
    const auto manifest3 = nlohmann::json::parse(read_text_file(d3 + "/manifest.json"));
    CHECK(manifest3.at("root_seed") == 10);

    // zero records still produces a manifest
    const std::string d4 = dir.file("run4");
    CHECK(run_cli("simulate --config " + dir.file("sim.cfg") + " --out " + d4 + " --records 0") ==
          0);
    CHECK(nlohmann::json::parse(read_text_file(d4 + "/manifest.json")).at("artifacts").empty());
}

TEST_CASE("simulate error codes distinguish bad values from bad files") {
    TempDir dir;
    atomic_write_file(dir.file("invalid.cfg"), "n_thermal -1\n");
    CHECK(run_cli("simulate --config " + dir.file("invalid.cfg") + " --out " + dir.file("o1")) ==
          1);

    atomic_write_file(dir.file("broken.cfg"), "n_max x\n");
    CHECK(run_cli("simulate --config " + dir.file("broken.cfg") + " --out " + dir.file("o2")) ==
          2);

    CHECK(run_cli("simulate --config " + dir.file("missing.cfg") + " --out " + dir.file("o3")) ==
          2);
}

TEST_CASE("estimate produces a trajectory csv") {
    TempDir dir;
    atomic_write_file(dir.file("sim.cfg"), "n_samples 40\nseed 21\n");
    REQUIRE(run_cli("simulate --config " + dir.file("sim.cfg") + " --out " + dir.file("rec")) ==
            0);

    const std::string csv = dir.file("traj.csv");
    CHECK(run_cli("estimate --record " + dir.file("rec") + "/record_00000.txt --out " + csv) == 0);

    const auto lines = file_lines(csv);
    REQUIRE(lines.size() >= 42); // header + 41 rows
    const auto header = split(lines[0], ',');
    CHECK(header[0] == "t_seconds");
    const auto first = split(lines[1], ',');
    CHECK(parse_double(first[0]).value() == 0.0);
    for (int n = 0; n < 25; ++n)
        CHECK(parse_double(first[static_cast<size_t>(1 + n)]).value() == 0.04);
    CHECK(fs::exists(csv + ".manifest.json"));

    CHECK(run_cli("estimate --record " + dir.file("nope.txt") + " --out " + csv) == 2);
}

TEST_CASE("estimate reports numerical failure on an annihilating record") {
    TempDir dir;
    const std::string record = "pqs-record 1\n"
                               "seed 1\n"
                               "n_samples 1\n"
                               "n_max 2\n"
                               "phi0 0\n"
                               "fringe_offset 0\n"
                               "fringe_contrast 1\n"
                               "phases 1.5707963267948966\n"
                               "t_sample 8.6e-05\n"
                               "t_cavity 0.065\n"
                               "n_thermal 0\n"
                               "detection_efficiency 0.3\n"
                               "mean_atoms_per_sample 0.3\n"
                               "samples\n"
                               "0,0,g\n";
    atomic_write_file(dir.file("dead.txt"), record);
    CHECK(run_cli("estimate --record " + dir.file("dead.txt") + " --out " + dir.file("t.csv")) ==
          3);
}

TEST_CASE("free-decay experiment artifacts") {
    TempDir dir;
    const std::string out = dir.file("exp1");
    REQUIRE(run_cli("experiment --which 1 --out " + out + " --realizations 2 --seed 5") == 0);

    const auto lines = file_lines(out + "/experiment1.csv");
    CHECK(lines[0] == "t_seconds,sigma_fwd,sigma_bwd,sigma_pqs");
    CHECK(lines.size() == 7003); // header + 7001 rows + trailing newline

    const auto side = nlohmann::json::parse(read_text_file(out + "/experiment1.json"));
    CHECK(side.at("n_realizations") == 2);
    CHECK(side.at("n_simulated") == 2);
    CHECK(side.at("failures").empty());
    CHECK(side.at("root_seed") == 5);

    const SimConfig used = load_sim_config(out + "/config_used.txt");
    CHECK(used.n_samples_total == 7000);
    CHECK(used.initial_state == InitialState::coherent(12.0));
    CHECK(used.seed == 5);

    const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
    CHECK(manifest.at("command") == "experiment 1");
    CHECK(manifest.at("artifacts").size() == 3);

    // a worker-count override must not change the averages
    const std::string out2 = dir.file("exp1w");
    REQUIRE(run_cli("experiment --which 1 --out " + out2 + " --realizations 2 --seed 5",
                    "PQS_WORKERS=3 ") == 0);
    CHECK(read_text_file(out + "/experiment1.csv") == read_text_file(out2 + "/experiment1.csv"));

    CHECK(run_cli("experiment --which 1 --out " + dir.file("bad") + " --realizations 2",
                  "PQS_WORKERS=abc ") == 1);
}

TEST_CASE("injection experiment artifacts") {
    TempDir dir;
    const std::string out = dir.file("exp2");
    REQUIRE(run_cli("experiment --which 2 --out " + out + " --realizations 1200 --seed 31415") ==
            0);

    const auto lines = file_lines(out + "/experiment2.csv");
    CHECK(lines[0] == "t_seconds,mean_fwd,mean_bwd,mean_pqs,fit_value");
    CHECK(lines.size() == 8004); // header + 8002 rows + trailing newline

    const auto side = nlohmann::json::parse(read_text_file(out + "/experiment2.json"));
    CHECK(side.at("n_simulated") == 1200);
    CHECK(side.at("n_realizations").get<int>() > 10);
    CHECK(side.at("emission_probability").get<double>() > 0.5);
    CHECK(side.at("predicted_amplitude").get<double>() > 1.0);
    CHECK(side.contains("jump_time_std_pqs"));
    CHECK(side.contains("curve_crossing_pqs"));
    CHECK(side.contains("fit_amplitude"));
    CHECK(side.at("fit_decay_time").get<double>() > 0.0);

    // the calibrated emission probability lands in the recorded config
    const SimConfig used = load_sim_config(out + "/config_used.txt");
    REQUIRE(used.injection.has_value());
    REQUIRE(used.injection->emission_probability.has_value());
    CHECK(*used.injection->emission_probability ==
          side.at("emission_probability").get<double>());
}
