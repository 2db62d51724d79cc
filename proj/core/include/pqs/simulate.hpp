#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqs/record.hpp"
#include "pqs/rng.hpp"

namespace pqs {

enum class InitialStateKind { coherent, thermal, fock };

struct InitialState {
    InitialStateKind kind = InitialStateKind::thermal;
    double coherent_mean = 0.0;
    int fock_n = 0;

    static InitialState coherent(double mean);
    static InitialState thermal();
    static InitialState fock(int n);

    bool operator==(const InitialState&) const = default;
};

struct SimConfig {
    ModelParams model = ModelParams::defaults();
    InitialState initial_state;
    int n_samples_total = 7000;
    std::optional<InjectionSettings> injection;
    std::uint64_t seed = 0;
};

// The truth process runs on a taller ladder than the estimator so that a
// coherent state filling the estimator window never feels the truncation;
// the meter reading aliases n above n_max naturally (period 2*pi/phi0).
inline constexpr int kTruthHeadroom = 10;

// Resonant atoms emit with high probability; used when a config requests an
// injection without fixing the emission probability.
inline constexpr double kDefaultEmissionProbability = 0.95;

inline int truth_cap(const ModelParams& params) { return params.n_max + kTruthHeadroom; }

// P(X > k) for X ~ Poisson(mean).
double poisson_tail_above(double mean, int k);

std::vector<std::string> validate(const SimConfig& config);
void require_valid(const SimConfig& config);

// Pre-drawn resonant-sample outcomes. Drawn before the truth trajectory so
// the injected photon count can be threaded into it (the recorded outcomes
// depend on emission, not on the cavity state).
struct InjectionDraw {
    int true_atoms = 0;
    std::vector<unsigned char> emitted;  // per atom
    std::vector<unsigned char> detected; // per atom

    int injected_photons() const;
    Sample to_sample(int phase_index) const;
};

// Requires config.injection with a resolved emission probability.
InjectionDraw draw_injection(const SimConfig& config, Rng& rng);

// Exact event-time birth-death trajectory over [0, S*t_sample] with down
// rate kappa*(1+n_b)*n and up rate kappa*n_b*(n+1). injected_photons unit
// jumps are inserted at the injection sample's midpoint. Throws
// NumericalError if the path reaches the top of the truth ladder.
TruthTrajectory simulate_truth(const SimConfig& config, Rng& rng, int injected_photons = 0);

// Samples the detection record of a given truth path: per sample a Poisson
// atom count, per atom a detection thinning, per detected atom a fringe
// outcome at the truth's photon number at that sample's readout time. The
// injection sample, when present, is emplaced from the pre-drawn outcomes.
DetectionRecord generate_record(const SimConfig& config, const TruthTrajectory& truth, Rng& rng,
                                const InjectionDraw* injection = nullptr);

// Full pipeline seeded from config.seed: injection draw, truth, record.
DetectionRecord simulate_record(const SimConfig& config);

bool is_single_g(const DetectionRecord& record, int injection_sample);

// Exactly one g detection and no e detection in the injection sample.
std::vector<DetectionRecord> select_single_g(const std::vector<DetectionRecord>& records,
                                             int injection_sample);

} // namespace pqs
