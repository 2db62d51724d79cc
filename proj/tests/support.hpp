#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pqs/model.hpp"
#include "pqs/relaxation.hpp"
#include "pqs/rng.hpp"

namespace testsup {

// Row-major dense matrix, M[i][j].
using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(std::size_t n) {
    return Matrix(n, std::vector<double>(n, 0.0));
}

inline Matrix identity(std::size_t n) {
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix dense_from_tridiagonal(const pqs::Tridiagonal& k) {
    const std::size_t n = k.diag.size();
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = k.diag[i];
        if (i + 1 < n) {
            m[i][i + 1] = k.super[i];
            m[i + 1][i] = k.sub[i];
        }
    }
    return m;
}

// One-interval transition matrix, column j extracted by stepping a basis vector.
inline Matrix dense_step(const pqs::ModelParams& params, bool forward = true) {
    const pqs::RelaxationStep step(params);
    const std::size_t n = step.size();
    Matrix m = zeros(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col(n, 0.0);
        col[j] = 1.0;
        step.apply(col, forward);
        for (std::size_t i = 0; i < n; ++i) m[i][j] = col[i];
    }
    return m;
}

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    const std::size_t n = m.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += m[i][j] * x[j];
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix c = zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

inline double norm_inf(const Matrix& m) {
    double best = 0.0;
    for (const auto& row : m) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

// Scaling-and-squaring matrix exponential with a Taylor core.  Accurate to
// machine precision for the modest norms exercised here.
inline Matrix expm(const Matrix& a) {
    const std::size_t n = a.size();
    int squarings = 0;
    double norm = norm_inf(a);
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    Matrix as = a;
    for (auto& row : as)
        for (double& v : row) v *= scale;

    Matrix result = identity(n);
    Matrix term = identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = matmul(term, as);
        for (auto& row : term)
            for (double& v : row) v /= static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
        if (norm_inf(term) < 1e-22) break;
    }
    for (int k = 0; k < squarings; ++k) result = matmul(result, result);
    return result;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::logic_error("max_abs_diff: size mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

inline std::vector<double> normalized(std::vector<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (!(sum > 0.0)) throw std::logic_error("normalized: nonpositive sum");
    for (double& x : v) x /= sum;
    return v;
}

// Per-sample measurement weight vector: the diagonal of the update for that
// sample, read off by weighting a vector of ones.
inline std::vector<double> sample_weights(const pqs::ModelParams& params, const pqs::Sample& sample) {
    std::vector<double> ones(static_cast<std::size_t>(params.n_max), 1.0);
    return pqs::measurement_update(params, sample, ones);
}

// Exhaustive path sum over x_0..x_last: weight(path) = prior[x_0] *
// prod_{k=1..last} T[x_k][x_{k-1}] * w_k[x_k], marginalized at index marg_at.
// Exponential cost; keep n_max <= 4 and last <= 6.
inline std::vector<double> path_marginal(const pqs::ModelParams& params,
                                         const std::vector<pqs::Sample>& samples,
                                         const std::vector<double>& prior,
                                         std::size_t last, std::size_t marg_at) {
    const std::size_t n = static_cast<std::size_t>(params.n_max);
    const Matrix t = dense_step(params);
    std::vector<std::vector<double>> weights;
    weights.reserve(last);
    for (std::size_t k = 0; k < last; ++k) weights.push_back(sample_weights(params, samples.at(k)));

    std::vector<std::size_t> path(last + 1, 0);
    std::vector<double> marginal(n, 0.0);
    while (true) {
        double w = prior[path[0]];
        for (std::size_t k = 1; k <= last && w != 0.0; ++k)
            w *= t[path[k]][path[k - 1]] * weights[k - 1][path[k]];
        marginal[path[marg_at]] += w;

        std::size_t pos = 0;
        while (pos <= last) {
            if (++path[pos] < n) break;
            path[pos] = 0;
            ++pos;
        }
        if (pos > last) break;
    }
    return marginal;
}

// Suffix path sum: for each value n at index s, the total weight of
// x_{s+1}..x_S with products T[x_k][x_{k-1}] * w_k[x_k].  Matches the
// backward filter up to normalization.
inline std::vector<double> suffix_likelihood(const pqs::ModelParams& params,
                                             const std::vector<pqs::Sample>& samples,
                                             std::size_t s) {
    const std::size_t n = static_cast<std::size_t>(params.n_max);
    const std::size_t total = samples.size();
    const Matrix t = dense_step(params);
    std::vector<double> like(n, 1.0);
    for (std::size_t k = total; k > s; --k) {
        const auto w = sample_weights(params, samples[k - 1]);
        std::vector<double> next(n, 0.0);
        for (std::size_t from = 0; from < n; ++from) {
            double acc = 0.0;
            for (std::size_t to = 0; to < n; ++to) acc += t[to][from] * w[to] * like[to];
            next[from] = acc;
        }
        like = std::move(next);
    }
    return like;
}

inline pqs::ModelParams random_params(pqs::Rng& rng, int n_max) {
    pqs::ModelParams p = pqs::ModelParams::defaults();
    p.n_max = n_max;
    p.phi0 = 0.15 + 0.95 * rng.uniform();
    p.fringe_offset = 0.08 * rng.uniform();
    p.fringe_contrast = 0.1 + (0.8 - p.fringe_offset) * rng.uniform();
    const int n_phases = 1 + static_cast<int>(rng.uniform() * 4.0);
    p.phases.clear();
    for (int i = 0; i < n_phases; ++i) p.phases.push_back(3.14159 * rng.uniform());
    p.t_cavity = 0.02 + 0.08 * rng.uniform();
    p.n_thermal = 0.2 * rng.uniform();
    p.mean_atoms_per_sample = 0.3 + 0.9 * rng.uniform();
    return p;
}

inline std::vector<pqs::Sample> random_samples(pqs::Rng& rng, const pqs::ModelParams& params,
                                               std::size_t count, double mean_detections) {
    std::vector<pqs::Sample> samples(count);
    for (std::size_t s = 0; s < count; ++s) {
        const long atoms = rng.poisson(mean_detections);
        const int phase = static_cast<int>(s % params.phases.size());
        for (long a = 0; a < atoms; ++a) {
            const pqs::Outcome o = rng.bernoulli(0.5) ? pqs::Outcome::g : pqs::Outcome::e;
            samples[s].detections.push_back({o, phase});
        }
    }
    return samples;
}

}  // namespace testsup
