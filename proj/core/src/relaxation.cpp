#include "pqs/relaxation.hpp"

#include <cstddef>
#include <stdexcept>

#include "pqs/errors.hpp"

namespace pqs {

Tridiagonal relaxation_generator(const ModelParams& params) {
    const int N = params.n_max;
    if (N < 2) throw std::domain_error("relaxation_generator: n_max must be at least 2");
    const double kappa = params.kappa();
    const double nb = params.n_thermal;

    Tridiagonal K;
    K.diag.resize(static_cast<size_t>(N));
    K.super.resize(static_cast<size_t>(N - 1));
    K.sub.resize(static_cast<size_t>(N - 1));

    for (int n = 0; n < N; ++n) {
        const double down = kappa * (1.0 + nb) * n;
        // no upward outflow at the truncation edge
        const double up = (n < N - 1) ? kappa * nb * (n + 1) : 0.0;
        K.diag[static_cast<size_t>(n)] = -(down + up);
    }
    for (int n = 0; n < N - 1; ++n) {
        K.super[static_cast<size_t>(n)] = kappa * (1.0 + nb) * (n + 1); // decay n+1 -> n
        K.sub[static_cast<size_t>(n)] = kappa * nb * (n + 1);           // excitation n -> n+1
    }
    return K;
}

RelaxationStep::RelaxationStep(const ModelParams& params) {
    const Tridiagonal K = relaxation_generator(params);
    const double dt = params.t_sample;
    const size_t N = K.diag.size();

    diag_.resize(N);
    super_.resize(N - 1);
    sub_.resize(N - 1);
    for (size_t n = 0; n < N; ++n) {
        diag_[n] = 1.0 + dt * K.diag[n];
        if (!(diag_[n] > 0.0))
            throw ConfigError("relaxation step too coarse: nonpositive diagonal at level " +
                              std::to_string(n));
    }
    for (size_t n = 0; n + 1 < N; ++n) {
        super_[n] = dt * K.super[n];
        sub_[n] = dt * K.sub[n];
    }
}

void RelaxationStep::apply(PhotonDistribution& dist, bool forward) const {
    const size_t N = diag_.size();
    if (dist.size() != N) throw std::domain_error("relaxation step: distribution size mismatch");
    // forward: out[n] = diag[n] d[n] + super[n] d[n+1] + sub[n-1] d[n-1]
    // backward swaps the roles of super and sub (transpose)
    const std::vector<double>& above = forward ? super_ : sub_;
    const std::vector<double>& below = forward ? sub_ : super_;
    double prev = 0.0;
    for (size_t n = 0; n < N; ++n) {
        const double cur = dist[n];
        double out = diag_[n] * cur;
        if (n + 1 < N) out += above[n] * dist[n + 1];
        if (n > 0) out += below[n - 1] * prev;
        dist[n] = out;
        prev = cur;
    }
}

PhotonDistribution relaxation_step(const ModelParams& params, PhotonDistribution dist,
                                   bool forward) {
    RelaxationStep step(params);
    step.apply(dist, forward);
    return dist;
}

} // namespace pqs
