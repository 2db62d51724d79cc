#pragma once

#include <optional>
#include <vector>

#include "pqs/model.hpp"

namespace pqs {

// Output of one filtering pass over S samples: dists[s] is the normalized
// distribution at t_s for s = 0..S, log_norms[k] the log of the
// normalization constant absorbed at step k (size S). Forward pass: step k
// produces dists[k+1]. Backward pass: step k produces dists[k] from
// dists[k+1].
struct FilterResult {
    std::vector<PhotonDistribution> dists;
    std::vector<double> log_norms;
};

// Bayesian filter conditioned on detections up to t: each step propagates
// one relaxation interval then applies that sample's measurement weights,
// then renormalizes. Throws NumericalError if a sample annihilates the
// distribution (inconsistent record).
FilterResult forward_filter(const ModelParams& params, const std::vector<Sample>& samples,
                            const PhotonDistribution& prior);

// Adjoint pass: likelihood of the detections after t as a function of the
// photon number at t. Runs from s = S downward, applying a sample's
// measurement weights then the transposed relaxation map; each stored
// vector is renormalized for output with the norm logged.
FilterResult backward_filter(const ModelParams& params, const std::vector<Sample>& samples,
                             const PhotonDistribution& terminal);

// Normalized entrywise product of forward and backward distributions.
// Throws NumericalError when the supports are disjoint.
PhotonDistribution combine_pqs(const PhotonDistribution& forward,
                               const PhotonDistribution& backward);

struct SmoothedTrajectory {
    std::vector<double> times; // t_s = s * t_sample
    std::vector<PhotonDistribution> forward;
    std::vector<PhotonDistribution> backward;
    std::vector<PhotonDistribution> pqs;
    std::vector<double> log_norms_forward;
    std::vector<double> log_norms_backward;
};

// Runs both filters with uniform prior and terminal and combines them at
// every sample time.
SmoothedTrajectory smooth(const ModelParams& params, const std::vector<Sample>& samples);

struct SummarySeries {
    std::vector<double> mean_n;
    std::vector<double> std_n;
    std::vector<int> map_n;
    std::vector<double> map_prob;
};

SummarySeries summarize(const std::vector<PhotonDistribution>& dists);

enum class CrossingDirection { rising, falling };

// First time mean crosses the threshold in the given direction, linearly
// interpolated between the bracketing samples. Sitting exactly on the
// threshold does not count as a crossing until the value moves past it.
std::optional<double> jump_time(const std::vector<double>& times,
                                const std::vector<double>& values, double threshold,
                                CrossingDirection direction);

} // namespace pqs
