#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pqs/estimator.hpp"
#include "pqs/experiments.hpp"

namespace pqs {

// Written alongside every output set; the config hash binds artifacts to
// the exact configuration text they came from.
struct RunManifest {
    std::string config_hash;
    std::uint64_t root_seed = 0;
    std::string command;
    std::vector<std::string> artifact_paths;
    std::string tool_version;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

void write_manifest(const std::string& path, const RunManifest& manifest);

// One row per sample time: the three distributions followed by their
// mean/std/map summaries.
void write_trajectory_csv(const std::string& path, const SmoothedTrajectory& traj);

// Free-decay ensemble: t_seconds, sigma_fwd, sigma_bwd, sigma_pqs.
void write_experiment1_csv(const std::string& path, const EnsembleResult& result);

// Injection ensemble: t_seconds, mean_fwd, mean_bwd, mean_pqs, fit_value.
// The fit column is evaluated after the injection only; earlier rows hold
// nan.
void write_experiment2_csv(const std::string& path, const EnsembleResult& result,
                           const ExpFit& fit);

// Ensemble sizes, failures and seed; for the injection experiment also the
// calibration, selection, jump-time statistics, curve crossings and fit.
void write_experiment_sidecar(const std::string& path, const EnsembleResult& result,
                              std::uint64_t root_seed, const ExpFit* fit,
                              const JumpWindow* window);

} // namespace pqs
