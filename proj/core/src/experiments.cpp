#include "pqs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>

#include "pqs/errors.hpp"
#include "pqs/rng.hpp"

namespace pqs {

JumpStats jump_stats(const std::vector<double>& jump_times) {
    JumpStats st;
    st.count = static_cast<int>(jump_times.size());
    if (st.count == 0) return st;
    double sum = 0.0;
    for (double v : jump_times) sum += v;
    st.mean = sum / st.count;
    if (st.count >= 2) {
        double ss = 0.0;
        for (double v : jump_times) ss += (v - st.mean) * (v - st.mean);
        st.stddev = std::sqrt(ss / (st.count - 1));
    }
    return st;
}

std::optional<double> windowed_crossing(const std::vector<double>& times,
                                        const std::vector<double>& values, double threshold,
                                        CrossingDirection direction, double t_lo, double t_hi) {
    std::vector<double> ts, vs;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        ts.push_back(times[i]);
        vs.push_back(values[i]);
    }
    return jump_time(ts, vs, threshold, direction);
}

double calibrate_emission_probability(const ModelParams& params, double target_fraction) {
    if (!(target_fraction > 0.0 && target_fraction < 1.0))
        throw ConfigError("calibration target fraction must lie in (0, 1)");
    const double le = params.mean_atoms_per_sample * params.detection_efficiency;
    if (!(le > 0.0))
        throw ConfigError("cannot calibrate emission probability: detected-atom rate is zero");
    const double q = target_fraction * std::exp(le) / le;
    if (!(q > 0.0 && q <= 1.0))
        throw ConfigError("selection target unreachable: implied emission probability " +
                          std::to_string(q));
    return q;
}

double predicted_injection_amplitude(const ModelParams& params, double emission_probability) {
    // the selected detected-g atom injected one photon; undetected emitters
    // are Poisson(lam*(1-eta)*q) independent of the selection
    return 1.0 +
           params.mean_atoms_per_sample * (1.0 - params.detection_efficiency) * emission_probability;
}

namespace {

struct CurveAccum {
    std::vector<double> sum, sumsq;

    void init(size_t n) {
        sum.assign(n, 0.0);
        sumsq.assign(n, 0.0);
    }
    void add(const std::vector<double>& v) {
        for (size_t i = 0; i < v.size(); ++i) {
            sum[i] += v[i];
            sumsq[i] += v[i] * v[i];
        }
    }
    void merge(const CurveAccum& o) {
        for (size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
    }
};

struct BlockAccum {
    CurveAccum std_f, std_b, std_p, mean_f, mean_b, mean_p;
    std::vector<double> jt_f, jt_b, jt_p;
    int n_ok = 0;
    int n_selected = 0;
    std::vector<std::string> failures;

    void init(size_t n) {
        std_f.init(n);
        std_b.init(n);
        std_p.init(n);
        mean_f.init(n);
        mean_b.init(n);
        mean_p.init(n);
    }
    void merge(const BlockAccum& o) {
        std_f.merge(o.std_f);
        std_b.merge(o.std_b);
        std_p.merge(o.std_p);
        mean_f.merge(o.mean_f);
        mean_b.merge(o.mean_b);
        mean_p.merge(o.mean_p);
        jt_f.insert(jt_f.end(), o.jt_f.begin(), o.jt_f.end());
        jt_b.insert(jt_b.end(), o.jt_b.begin(), o.jt_b.end());
        jt_p.insert(jt_p.end(), o.jt_p.begin(), o.jt_p.end());
        n_ok += o.n_ok;
        n_selected += o.n_selected;
        failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    }
};

constexpr int kBlockRuns = 16;

int pick_workers(int workers, int n_blocks) {
    int w = workers;
    if (w <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        w = hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
    }
    return std::clamp(w, 1, std::max(n_blocks, 1));
}

// Runs per_run(k, block) for k = 0..n_runs-1 grouped into fixed blocks that
// are merged in index order, so the reduction is identical for every worker
// count. per_run must confine its effects to the given block.
template <typename PerRun>
BlockAccum run_blocks(int n_runs, int workers, size_t grid, PerRun&& per_run) {
    const int n_blocks = (n_runs + kBlockRuns - 1) / kBlockRuns;
    std::vector<BlockAccum> blocks(static_cast<size_t>(n_blocks));
    for (auto& b : blocks) b.init(grid);

    std::atomic<int> next{0};
    auto drain = [&]() {
        while (true) {
            const int b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const int lo = b * kBlockRuns;
            const int hi = std::min(n_runs, lo + kBlockRuns);
            for (int k = lo; k < hi; ++k) per_run(k, blocks[static_cast<size_t>(b)]);
        }
    };

    const int w = pick_workers(workers, n_blocks);
    if (w == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(w));
        for (int i = 0; i < w; ++i) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }

    BlockAccum total;
    total.init(grid);
    for (const auto& b : blocks) total.merge(b);
    return total;
}

void fill_curves(EnsembleResult& result, const BlockAccum& total) {
    const int n = total.n_ok;
    auto fill = [n](const CurveAccum& acc, std::vector<double>& avg, std::vector<double>* se) {
        const size_t g = acc.sum.size();
        avg.assign(g, 0.0);
        if (se) se->assign(g, 0.0);
        if (n < 1) return;
        for (size_t i = 0; i < g; ++i) {
            avg[i] = acc.sum[i] / n;
            if (se && n >= 2) {
                const double var = std::max(0.0, acc.sumsq[i] - acc.sum[i] * acc.sum[i] / n);
                (*se)[i] = std::sqrt(var / (static_cast<double>(n - 1) * n));
            }
        }
    };
    fill(total.std_f, result.avg_std_forward, &result.se_std_forward);
    fill(total.std_b, result.avg_std_backward, &result.se_std_backward);
    fill(total.std_p, result.avg_std_pqs, &result.se_std_pqs);
    fill(total.mean_f, result.avg_mean_forward, nullptr);
    fill(total.mean_b, result.avg_mean_backward, nullptr);
    fill(total.mean_p, result.avg_mean_pqs, nullptr);
    result.jump_times_forward = total.jt_f;
    result.jump_times_backward = total.jt_b;
    result.jump_times_pqs = total.jt_p;
    result.n_realizations = n;
    result.failures = total.failures;
}

} // namespace

EnsembleResult run_experiment1(const SimConfig& config, int n_realizations, int workers) {
    if (config.injection)
        throw ConfigError("the free-decay experiment takes no injection");
    if (n_realizations < 1) throw ConfigError("n_realizations must be positive");
    require_valid(config);
    const size_t grid = static_cast<size_t>(config.n_samples_total) + 1;

    const BlockAccum total =
        run_blocks(n_realizations, workers, grid, [&](int k, BlockAccum& blk) {
            try {
                SimConfig c = config;
                c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
                const DetectionRecord rec = simulate_record(c);
                const SmoothedTrajectory traj = smooth(config.model, rec.samples);
                const SummarySeries sf = summarize(traj.forward);
                const SummarySeries sb = summarize(traj.backward);
                const SummarySeries sp = summarize(traj.pqs);
                blk.std_f.add(sf.std_n);
                blk.std_b.add(sb.std_n);
                blk.std_p.add(sp.std_n);
                blk.mean_f.add(sf.mean_n);
                blk.mean_b.add(sb.mean_n);
                blk.mean_p.add(sp.mean_n);
                blk.n_ok += 1;
            } catch (const std::exception& ex) {
                blk.failures.push_back("realization " + std::to_string(k) + ": " + ex.what());
            }
        });

    EnsembleResult result;
    result.times.resize(grid);
    for (size_t i = 0; i < grid; ++i)
        result.times[i] = static_cast<double>(i) * config.model.t_sample;
    fill_curves(result, total);
    result.n_simulated = n_realizations;
    return result;
}

EnsembleResult run_experiment2(const SimConfig& config, int n_runs, int workers,
                               JumpWindow window) {
    if (!config.injection)
        throw ConfigError("the injection experiment requires injection settings");
    if (n_runs < 1) throw ConfigError("n_runs must be positive");
    SimConfig base = config;
    if (!base.injection->emission_probability)
        base.injection->emission_probability =
            calibrate_emission_probability(base.model, kSelectionTargetFraction);
    require_valid(base);
    const double q = *base.injection->emission_probability;
    const int at = base.injection->at_sample;
    const double t_inj = (at + 0.5) * base.model.t_sample;
    const size_t grid = static_cast<size_t>(base.n_samples_total) + 1;

    const BlockAccum total = run_blocks(n_runs, workers, grid, [&](int k, BlockAccum& blk) {
        try {
            SimConfig c = base;
            c.seed = derive_seed(base.seed, static_cast<std::uint64_t>(k));
            const DetectionRecord rec = simulate_record(c);
            if (!is_single_g(rec, at)) return;
            blk.n_selected += 1;
            const SmoothedTrajectory traj = smooth(base.model, rec.samples);
            const SummarySeries sf = summarize(traj.forward);
            const SummarySeries sb = summarize(traj.backward);
            const SummarySeries sp = summarize(traj.pqs);
            blk.std_f.add(sf.std_n);
            blk.std_b.add(sb.std_n);
            blk.std_p.add(sp.std_n);
            blk.mean_f.add(sf.mean_n);
            blk.mean_b.add(sb.mean_n);
            blk.mean_p.add(sp.mean_n);
            std::vector<double> rel(traj.times.size());
            for (size_t i = 0; i < rel.size(); ++i) rel[i] = traj.times[i] - t_inj;
            auto push = [&](const SummarySeries& s, std::vector<double>& out) {
                const auto jt = windowed_crossing(rel, s.mean_n, 0.5, CrossingDirection::rising,
                                                  -window.before, window.after);
                if (jt) out.push_back(*jt);
            };
            push(sf, blk.jt_f);
            push(sb, blk.jt_b);
            push(sp, blk.jt_p);
            blk.n_ok += 1;
        } catch (const std::exception& ex) {
            blk.failures.push_back("realization " + std::to_string(k) + ": " + ex.what());
        }
    });

    EnsembleResult result;
    result.times.resize(grid);
    for (size_t i = 0; i < grid; ++i)
        result.times[i] = static_cast<double>(i) * base.model.t_sample - t_inj;
    fill_curves(result, total);
    result.n_simulated = n_runs;
    result.emission_probability = q;
    result.selection_fraction = static_cast<double>(total.n_selected) / n_runs;
    result.predicted_amplitude = predicted_injection_amplitude(base.model, q);
    return result;
}

namespace {

// 3x3 linear solve with partial pivoting; false on a singular system.
bool solve3(double a[3][3], double b[3], double x[3]) {
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[piv[r]][col]) > std::abs(a[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double p = a[piv[col]][col];
        if (p == 0.0 || !std::isfinite(p)) return false;
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[piv[r]][col] / p;
            for (int cc = col; cc < 3; ++cc) a[piv[r]][cc] -= f * a[piv[col]][cc];
            b[piv[r]] -= f * b[piv[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = b[piv[row]];
        for (int cc = row + 1; cc < 3; ++cc) acc -= a[piv[row]][cc] * x[cc];
        x[row] = acc / a[piv[row]][row];
        if (!std::isfinite(x[row])) return false;
    }
    return true;
}

std::string fit_state(double a, double tau, double c) {
    return "a=" + std::to_string(a) + " tau=" + std::to_string(tau) + " c=" + std::to_string(c);
}

} // namespace

ExpFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                       double window_start) {
    if (times.size() != values.size()) throw std::domain_error("fit_exponential: size mismatch");
    std::vector<double> t, y;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_start) continue;
        if (!std::isfinite(values[i]))
            throw NumericalError("fit_exponential: non-finite value inside the fit window");
        t.push_back(times[i]);
        y.push_back(values[i]);
    }
    const size_t m = t.size();
    if (m < 10) throw ConfigError("fit window keeps fewer than 10 points");

    // deterministic initialization: offset from the tail, amplitude from the
    // first point, rate from a log-linear regression of the excess
    const size_t tail = std::max<size_t>(5, m / 4);
    double c0 = 0.0;
    for (size_t i = m - tail; i < m; ++i) c0 += y[i];
    c0 /= static_cast<double>(tail);
    const double a0 = y[0] - c0;
    const double sign = a0 >= 0.0 ? 1.0 : -1.0;
    size_t nz = 0;
    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double d = sign * (y[i] - c0);
        if (!(d > 0.0)) continue;
        const double z = std::log(d);
        nz += 1;
        st += t[i];
        sz += z;
        stt += t[i] * t[i];
        stz += t[i] * z;
    }
    const double det0 = static_cast<double>(nz) * stt - st * st;
    if (a0 == 0.0 || nz < 2 || !(det0 > 0.0))
        throw NumericalError("exponential fit: degenerate data, no decaying excess over the tail");
    const double slope = (static_cast<double>(nz) * stz - st * sz) / det0;
    if (!(slope < 0.0))
        throw NumericalError("exponential fit: degenerate data, excess does not decay (" +
                             fit_state(a0, 0.0, c0) + ")");
    const double tau0 = -1.0 / slope;

    double a = a0, tau = tau0, c = c0;
    auto cost_of = [&](double pa, double ptau, double pc) {
        double cost = 0.0;
        for (size_t i = 0; i < m; ++i) {
            const double r = pa * std::exp(-t[i] / ptau) + pc - y[i];
            cost += r * r;
        }
        return cost;
    };
    double cost = cost_of(a, tau, c);
    double lambda = 1e-3;
    const double tol = 1e-8;
    bool converged = false;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double jtr[3] = {0, 0, 0};
        for (size_t i = 0; i < m; ++i) {
            const double e = std::exp(-t[i] / tau);
            const double r = a * e + c - y[i];
            const double g[3] = {e, a * e * t[i] / (tau * tau), 1.0};
            for (int row = 0; row < 3; ++row) {
                jtr[row] += g[row] * r;
                for (int col = row; col < 3; ++col) jtj[row][col] += g[row] * g[col];
            }
        }
        for (int row = 1; row < 3; ++row)
            for (int col = 0; col < row; ++col) jtj[row][col] = jtj[col][row];

        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            double lhs[3][3];
            double rhs[3] = {-jtr[0], -jtr[1], -jtr[2]};
            for (int row = 0; row < 3; ++row)
                for (int col = 0; col < 3; ++col)
                    lhs[row][col] = jtj[row][col] * (row == col ? 1.0 + lambda : 1.0);
            double delta[3];
            if (!solve3(lhs, rhs, delta)) {
                lambda *= 10.0;
                continue;
            }
            const double na = a + delta[0], ntau = tau + delta[1], nc = c + delta[2];
            if (!(ntau > 0.0) || !std::isfinite(na) || !std::isfinite(ntau) ||
                !std::isfinite(nc)) {
                lambda *= 10.0;
                continue;
            }
            const double ncost = cost_of(na, ntau, nc);
            if (!(ncost <= cost)) {
                lambda *= 10.0;
                continue;
            }
            converged = std::abs(delta[0]) <= tol * (std::abs(a) + 1e-12) &&
                        std::abs(delta[1]) <= tol * (std::abs(tau) + 1e-12) &&
                        std::abs(delta[2]) <= tol * (std::abs(c) + 1e-12);
            a = na;
            tau = ntau;
            c = nc;
            cost = ncost;
            lambda = std::max(lambda / 3.0, 1e-14);
            accepted = true;
            break;
        }
        if (!accepted) break;
    }
    if (!converged)
        throw NumericalError("exponential fit did not converge from initialization " +
                             fit_state(a0, tau0, c0));

    ExpFit fit;
    fit.amplitude = a;
    fit.decay_time = tau;
    fit.offset = c;
    fit.fit_window_start = window_start;
    fit.residual_rms = std::sqrt(cost / static_cast<double>(m));
    return fit;
}

double fit_value(const ExpFit& fit, double t) {
    return fit.amplitude * std::exp(-t / fit.decay_time) + fit.offset;
}

} // namespace pqs
