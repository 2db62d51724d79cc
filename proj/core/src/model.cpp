#include "pqs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pqs/errors.hpp"

namespace pqs {

ModelParams ModelParams::defaults() {
    ModelParams p;
    p.phi0 = std::numbers::pi / 4.0;
    p.phases = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0,
                3.0 * std::numbers::pi / 4.0};
    return p;
}

std::vector<std::string> validate(const ModelParams& p) {
    std::vector<std::string> errs;
    auto fail = [&errs](const std::string& msg) { errs.push_back(msg); };

    if (p.n_max < 2) fail("n_max must be at least 2");
    if (!(p.t_sample > 0.0)) fail("t_sample must be positive");
    if (!(p.t_cavity > 0.0)) fail("t_cavity must be positive");
    if (p.t_sample > 0.0 && p.t_cavity > 0.0 && !(p.t_sample / p.t_cavity < 0.1))
        fail("t_sample must be well below t_cavity (ratio < 0.1)");
    const double A = p.fringe_offset, B = p.fringe_contrast;
    if (!(B >= 0.0)) fail("fringe_contrast must be nonnegative");
    if (!(A + B >= 0.0 && A + B <= 1.0)) fail("fringe_offset + fringe_contrast must lie in [0, 1]");
    // needed so both outcomes stay in [0, 1] at every phase
    if (!(A - B >= -1.0)) fail("fringe_offset - fringe_contrast must be >= -1");
    if (p.phases.empty()) fail("phases must be nonempty");
    for (double ph : p.phases)
        if (!std::isfinite(ph)) {
            fail("phases must be finite");
            break;
        }
    if (!std::isfinite(p.phi0)) fail("phi0 must be finite");
    if (!(p.detection_efficiency >= 0.0 && p.detection_efficiency <= 1.0))
        fail("detection_efficiency must lie in [0, 1]");
    if (!(p.n_thermal >= 0.0)) fail("n_thermal must be nonnegative");
    if (!(p.mean_atoms_per_sample >= 0.0)) fail("mean_atoms_per_sample must be nonnegative");
    if (p.n_max >= 2 && p.t_sample > 0.0 && p.t_cavity > 0.0) {
        // first-order relaxation step must keep every diagonal entry positive
        const double peak =
            p.t_sample * p.kappa() * ((1.0 + p.n_thermal) * (p.n_max - 1) + p.n_thermal * p.n_max);
        if (!(peak < 1.0)) fail("t_sample * kappa * n_max too large for a first-order step");
    }
    return errs;
}

void require_valid(const ModelParams& p) {
    auto errs = validate(p);
    if (errs.empty()) return;
    std::ostringstream msg;
    msg << "invalid model parameters:";
    for (const auto& e : errs) msg << "\n  " << e;
    throw ConfigError(msg.str());
}

PhotonDistribution uniform_distribution(int n_max) {
    if (n_max < 1) throw std::domain_error("uniform_distribution: n_max must be positive");
    return PhotonDistribution(static_cast<size_t>(n_max), 1.0 / n_max);
}

PhotonDistribution fock_distribution(int n_max, int n) {
    if (n_max < 1 || n < 0 || n >= n_max)
        throw std::domain_error("fock_distribution: n out of range");
    PhotonDistribution d(static_cast<size_t>(n_max), 0.0);
    d[static_cast<size_t>(n)] = 1.0;
    return d;
}

PhotonDistribution thermal_distribution(const ModelParams& params) {
    const int n_max = params.n_max;
    if (n_max < 1) throw std::domain_error("thermal_distribution: n_max must be positive");
    PhotonDistribution d(static_cast<size_t>(n_max));
    const double r = params.n_thermal / (1.0 + params.n_thermal);
    double w = 1.0;
    for (int n = 0; n < n_max; ++n, w *= r) d[static_cast<size_t>(n)] = w;
    normalize(d);
    return d;
}

double normalize(PhotonDistribution& dist) {
    double sum = 0.0;
    for (double v : dist) sum += v;
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw NumericalError("normalize: distribution sum is not positive");
    const double inv = 1.0 / sum;
    for (double& v : dist) v *= inv;
    return sum;
}

double distribution_mean(const PhotonDistribution& dist) {
    double m = 0.0;
    for (size_t n = 0; n < dist.size(); ++n) m += static_cast<double>(n) * dist[n];
    return m;
}

double distribution_std(const PhotonDistribution& dist) {
    const double m = distribution_mean(dist);
    double var = 0.0;
    for (size_t n = 0; n < dist.size(); ++n) {
        const double d = static_cast<double>(n) - m;
        var += d * d * dist[n];
    }
    return std::sqrt(std::max(var, 0.0));
}

int distribution_map(const PhotonDistribution& dist) {
    if (dist.empty()) throw std::domain_error("distribution_map: empty distribution");
    size_t best = 0;
    for (size_t n = 1; n < dist.size(); ++n)
        if (dist[n] > dist[best]) best = n;
    return static_cast<int>(best);
}

double fringe_value(const ModelParams& params, Outcome a, double phase, long n) {
    const double s = std::sin(params.phi0 * static_cast<double>(n) - phase);
    const double pg = 0.5 * (1.0 + params.fringe_offset + params.fringe_contrast * s);
    return a == Outcome::g ? pg : 1.0 - pg;
}

double fringe_probability(const ModelParams& params, Outcome a, int phase_index, int n) {
    if (n < 0 || n >= params.n_max)
        throw std::domain_error("fringe_probability: photon number out of range");
    if (phase_index < 0 || static_cast<size_t>(phase_index) >= params.phases.size())
        throw std::domain_error("fringe_probability: phase index out of range");
    return fringe_value(params, a, params.phases[static_cast<size_t>(phase_index)], n);
}

PhotonDistribution measurement_update(const ModelParams& params, const Sample& sample,
                                      PhotonDistribution dist) {
    if (sample.resonant_injection) return dist;
    for (const auto& det : sample.detections) {
        if (det.phase_index < 0 || static_cast<size_t>(det.phase_index) >= params.phases.size())
            throw std::domain_error("measurement_update: phase index out of range");
        const double phase = params.phases[static_cast<size_t>(det.phase_index)];
        for (size_t n = 0; n < dist.size(); ++n)
            dist[n] *= fringe_value(params, det.outcome, phase, static_cast<long>(n));
    }
    return dist;
}

} // namespace pqs
