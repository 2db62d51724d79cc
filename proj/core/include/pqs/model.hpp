#pragma once

#include <string>
#include <vector>

namespace pqs {

// All physical constants of the cavity + meter-atom model, in SI units.
struct ModelParams {
    int n_max = 25;                  // Fock-space truncation, levels 0..n_max-1
    double phi0 = 0.0;               // dispersive phase shift per photon [rad]
    double fringe_offset = 0.03;     // Ramsey fringe offset A
    double fringe_contrast = 0.71;   // Ramsey fringe contrast B
    std::vector<double> phases;      // interferometer phases cycled over samples [rad]
    double t_sample = 86e-6;         // meter sample period [s]
    double t_cavity = 65e-3;         // cavity energy damping time [s]
    double n_thermal = 0.074;        // thermal photon number of the environment
    double detection_efficiency = 0.30;
    double mean_atoms_per_sample = 0.28 / 0.30; // true atoms, before detection losses

    double kappa() const { return 1.0 / t_cavity; }

    static ModelParams defaults();

    bool operator==(const ModelParams&) const = default;
};

// Returns one message per violated constraint; empty means valid.
std::vector<std::string> validate(const ModelParams& params);

// Throws ConfigError listing every violated constraint.
void require_valid(const ModelParams& params);

enum class Outcome { g, e };

inline char outcome_char(Outcome a) { return a == Outcome::g ? 'g' : 'e'; }

struct AtomDetection {
    Outcome outcome;
    int phase_index; // index into ModelParams::phases

    bool operator==(const AtomDetection&) const = default;
};

// One meter sample: zero or more detected atoms. A resonant-injection sample
// carries its detections like any other but its atoms are not dispersive
// meters, so estimators must treat it as the identity.
struct Sample {
    std::vector<AtomDetection> detections;
    bool resonant_injection = false;

    bool operator==(const Sample&) const = default;
};

// Probability vector over Fock states 0..n_max-1. Normalized in most
// contexts; unnormalized variants appear where noted (measurement updates,
// backward propagation).
using PhotonDistribution = std::vector<double>;

PhotonDistribution uniform_distribution(int n_max);
PhotonDistribution fock_distribution(int n_max, int n);

// Truncated thermal (geometric) occupation with mean n_thermal; the exact
// stationary state of the relaxation generator.
PhotonDistribution thermal_distribution(const ModelParams& params);

// Rescales to unit sum and returns the original sum. Throws NumericalError
// if the sum is not positive and finite.
double normalize(PhotonDistribution& dist);

double distribution_mean(const PhotonDistribution& dist);
double distribution_std(const PhotonDistribution& dist);
// Most probable state; ties break toward smaller n.
int distribution_map(const PhotonDistribution& dist);

// Ramsey fringe probability of detecting outcome `a` given `n` photons and
// interferometer phase `phase`. Valid for any n >= 0; the sinusoid makes the
// reading periodic in n with period 2*pi/phi0.
double fringe_value(const ModelParams& params, Outcome a, double phase, long n);

// Range-checked variant: n must lie in [0, n_max) and phase_index must be a
// valid index into params.phases. Throws std::domain_error otherwise.
double fringe_probability(const ModelParams& params, Outcome a, int phase_index, int n);

// Bayes update for one sample: multiplies entry n by the fringe probability
// of every detection in the sample. Empty and resonant-injection samples are
// the identity. The result is intentionally not renormalized; the caller
// normalizes and may record the norm.
PhotonDistribution measurement_update(const ModelParams& params, const Sample& sample,
                                      PhotonDistribution dist);

} // namespace pqs
