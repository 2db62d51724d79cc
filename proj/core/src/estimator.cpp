#include "pqs/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pqs/errors.hpp"
#include "pqs/relaxation.hpp"

namespace pqs {

namespace {

// Sums, validates and rescales in place; returns log of the absorbed norm.
double renormalize_or_throw(PhotonDistribution& dist, const char* pass, size_t sample_index) {
    double sum = 0.0;
    for (double v : dist) sum += v;
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw NumericalError(std::string(pass) +
                             " filter: record annihilates the distribution at sample " +
                             std::to_string(sample_index));
    const double inv = 1.0 / sum;
    for (double& v : dist) v *= inv;
    return std::log(sum);
}

} // namespace

FilterResult forward_filter(const ModelParams& params, const std::vector<Sample>& samples,
                            const PhotonDistribution& prior) {
    if (prior.size() != static_cast<size_t>(params.n_max))
        throw std::domain_error("forward_filter: prior size does not match n_max");
    const RelaxationStep step(params);
    const size_t S = samples.size();

    FilterResult out;
    out.dists.reserve(S + 1);
    out.log_norms.reserve(S);
    PhotonDistribution cur = prior;
    out.dists.push_back(cur);
    for (size_t s = 0; s < S; ++s) {
        step.apply(cur, true);
        cur = measurement_update(params, samples[s], std::move(cur));
        out.log_norms.push_back(renormalize_or_throw(cur, "forward", s));
        out.dists.push_back(cur);
    }
    return out;
}

FilterResult backward_filter(const ModelParams& params, const std::vector<Sample>& samples,
                             const PhotonDistribution& terminal) {
    if (terminal.size() != static_cast<size_t>(params.n_max))
        throw std::domain_error("backward_filter: terminal size does not match n_max");
    const RelaxationStep step(params);
    const size_t S = samples.size();

    FilterResult out;
    out.dists.resize(S + 1);
    out.log_norms.resize(S);
    PhotonDistribution cur = terminal;
    out.dists[S] = cur;
    for (size_t s = S; s-- > 0;) {
        cur = measurement_update(params, samples[s], std::move(cur));
        step.apply(cur, false);
        out.log_norms[s] = renormalize_or_throw(cur, "backward", s);
        out.dists[s] = cur;
    }
    return out;
}

PhotonDistribution combine_pqs(const PhotonDistribution& forward,
                               const PhotonDistribution& backward) {
    if (forward.size() != backward.size())
        throw std::domain_error("combine_pqs: size mismatch");
    PhotonDistribution out(forward.size());
    double sum = 0.0;
    for (size_t n = 0; n < out.size(); ++n) {
        out[n] = forward[n] * backward[n];
        sum += out[n];
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw NumericalError("combine_pqs: forward and backward supports are disjoint");
    const double inv = 1.0 / sum;
    for (double& v : out) v *= inv;
    return out;
}

SmoothedTrajectory smooth(const ModelParams& params, const std::vector<Sample>& samples) {
    const PhotonDistribution flat = uniform_distribution(params.n_max);
    SmoothedTrajectory out;
    {
        FilterResult f = forward_filter(params, samples, flat);
        out.forward = std::move(f.dists);
        out.log_norms_forward = std::move(f.log_norms);
    }
    {
        FilterResult b = backward_filter(params, samples, flat);
        out.backward = std::move(b.dists);
        out.log_norms_backward = std::move(b.log_norms);
    }
    const size_t S = samples.size();
    out.times.resize(S + 1);
    out.pqs.resize(S + 1);
    for (size_t s = 0; s <= S; ++s) {
        out.times[s] = static_cast<double>(s) * params.t_sample;
        out.pqs[s] = combine_pqs(out.forward[s], out.backward[s]);
    }
    return out;
}

SummarySeries summarize(const std::vector<PhotonDistribution>& dists) {
    SummarySeries out;
    out.mean_n.reserve(dists.size());
    out.std_n.reserve(dists.size());
    out.map_n.reserve(dists.size());
    out.map_prob.reserve(dists.size());
    for (const auto& d : dists) {
        out.mean_n.push_back(distribution_mean(d));
        out.std_n.push_back(distribution_std(d));
        const int m = distribution_map(d);
        out.map_n.push_back(m);
        out.map_prob.push_back(d[static_cast<size_t>(m)]);
    }
    return out;
}

std::optional<double> jump_time(const std::vector<double>& times,
                                const std::vector<double>& values, double threshold,
                                CrossingDirection direction) {
    if (times.size() != values.size()) throw std::domain_error("jump_time: size mismatch");
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i], b = values[i + 1];
        const bool crossed = direction == CrossingDirection::rising
                                 ? (a <= threshold && b > threshold)
                                 : (a >= threshold && b < threshold);
        if (!crossed) continue;
        const double frac = (threshold - a) / (b - a);
        return times[i] + frac * (times[i + 1] - times[i]);
    }
    return std::nullopt;
}

} // namespace pqs
