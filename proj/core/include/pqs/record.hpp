#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pqs/model.hpp"

namespace pqs {

// Piecewise-constant photon-number path. photon_numbers[k] holds on
// [jump_times[k], jump_times[k+1]); initial_n holds before the first jump.
// Repeated times are allowed (stacked unit jumps at one instant).
struct TruthTrajectory {
    int initial_n = 0;
    std::vector<double> jump_times;  // sorted seconds
    std::vector<int> photon_numbers; // value after each jump

    int n_at(double t) const;

    bool operator==(const TruthTrajectory&) const = default;
};

struct InjectionSettings {
    int at_sample = 0;
    // absent means "to be calibrated"; must be resolved before simulating
    std::optional<double> emission_probability;

    bool operator==(const InjectionSettings&) const = default;
};

// A full measurement run: the model snapshot it was generated (or taken)
// under, one Sample per meter period, and optional generation metadata.
// Estimator code never receives the truth field; it is carried only for
// validation and artifact output.
struct DetectionRecord {
    ModelParams model_snapshot;
    std::vector<Sample> samples;
    std::uint64_t seed = 0;
    std::optional<InjectionSettings> injection;
    std::optional<TruthTrajectory> truth;
};

} // namespace pqs
