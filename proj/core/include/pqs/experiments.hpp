#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqs/estimator.hpp"
#include "pqs/simulate.hpp"

namespace pqs {

// Ensemble-averaged curves on the common time grid plus per-realization
// jump times. For the injection experiment, times are relative to the
// injection instant and curves average only the selected realizations.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<double> avg_std_forward, avg_std_backward, avg_std_pqs;
    std::vector<double> se_std_forward, se_std_backward, se_std_pqs; // standard errors
    std::vector<double> avg_mean_forward, avg_mean_backward, avg_mean_pqs;
    std::vector<double> jump_times_forward, jump_times_backward, jump_times_pqs;
    int n_realizations = 0; // realizations contributing to the curves
    int n_simulated = 0;    // total simulated runs (selection may discard some)
    std::vector<std::string> failures;
    // injection-experiment calibration results
    double emission_probability = 0.0;
    double selection_fraction = 0.0;
    double predicted_amplitude = 0.0; // expected photons injected given selection
};

struct ExpFit {
    double amplitude = 0.0;
    double decay_time = 0.0;
    double offset = 0.0;
    double fit_window_start = 0.0;
    double residual_rms = 0.0;
};

struct JumpStats {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

JumpStats jump_stats(const std::vector<double>& jump_times);

// First threshold crossing restricted to times in [t_lo, t_hi].
std::optional<double> windowed_crossing(const std::vector<double>& times,
                                        const std::vector<double>& values, double threshold,
                                        CrossingDirection direction, double t_lo, double t_hi);

// Search window for jump times around the injection instant. It must
// bracket the rise tightly: the cavity hosts unrelated thermal photons at
// rate kappa * n_thermal, and a first-crossing search over tens of ms
// latches onto those episodes instead of the injection.
struct JumpWindow {
    double before = 0.015; // seconds
    double after = 0.015;
};

// Reference single-g selection fraction used to calibrate the resonant
// emission probability when the config leaves it unspecified.
inline constexpr double kSelectionTargetFraction = 2962.0 / 16320.0;

// Decay fit starts this long after the injection.
inline constexpr double kFitWindowStart = 0.035;

// Inverts P(one detected g, no detected e) = lam*eta*q*exp(-lam*eta) for q.
// Throws ConfigError when the target cannot be reached with q in (0, 1].
double calibrate_emission_probability(const ModelParams& params, double target_fraction);

// Expected photons injected into the cavity conditioned on the single-g
// selection: the detected one plus Poisson-thinned undetected emitters.
double predicted_injection_amplitude(const ModelParams& params, double emission_probability);

// Free-decay ensemble: simulate n_realizations records, smooth each, and
// average the per-time standard deviations and means of the three analyses.
// config must not request injection. workers = 0 picks a machine default;
// results are identical for every worker count.
EnsembleResult run_experiment1(const SimConfig& config, int n_realizations, int workers = 0);

// Injection ensemble: simulate n_runs records with the configured injection
// (emission probability calibrated here when unset), keep the single-g
// selection, and aggregate curves and per-realization 0.5-threshold rising
// crossings relative to the injection time.
EnsembleResult run_experiment2(const SimConfig& config, int n_runs, int workers = 0,
                               JumpWindow window = {});

// Least squares a*exp(-t/tau) + c over points with t >= window_start.
// Deterministic initialization (offset from the tail mean, rate from a
// log-linear regression) refined by Levenberg-Marquardt to relative 1e-8.
ExpFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                       double window_start);

double fit_value(const ExpFit& fit, double t);

} // namespace pqs
