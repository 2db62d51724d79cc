#pragma once

#include <vector>

#include "pqs/model.hpp"

namespace pqs {

// Tridiagonal rate matrix, column convention dp/dt = K p.
struct Tridiagonal {
    std::vector<double> diag;  // K[n][n],   size n_max
    std::vector<double> super; // K[n][n+1], size n_max-1
    std::vector<double> sub;   // K[n+1][n], size n_max-1
};

// Birth-death generator of cavity relaxation. Down rate from level n is
// kappa*(1+n_thermal)*n, up rate kappa*n_thermal*(n+1); the up rate out of
// the top level is dropped so every column sums to zero on the truncated
// space and the truncated thermal state is exactly stationary.
Tridiagonal relaxation_generator(const ModelParams& params);

// One-sample propagator T = I + t_sample*K, precomputed from params.
// Forward applies T, backward applies its transpose. Construction throws
// ConfigError if the first-order step has a nonpositive diagonal entry.
class RelaxationStep {
  public:
    explicit RelaxationStep(const ModelParams& params);

    int size() const { return static_cast<int>(diag_.size()); }

    void apply(PhotonDistribution& dist, bool forward) const;

  private:
    std::vector<double> diag_, super_, sub_; // entries of T, same layout as Tridiagonal
};

PhotonDistribution relaxation_step(const ModelParams& params, PhotonDistribution dist,
                                   bool forward);

} // namespace pqs
