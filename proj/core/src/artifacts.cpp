#include "pqs/artifacts.hpp"

#include <limits>

#include "json.hpp"

#include "pqs/textio.hpp"
#include "pqs/version.hpp"

namespace pqs {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<size_t>(i)] = digits[v & 0xf];
    return out;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["tool_version"] = manifest.tool_version.empty() ? kToolVersion : manifest.tool_version;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_hash;
    j["root_seed"] = manifest.root_seed;
    j["artifacts"] = manifest.artifact_paths;
    atomic_write_file(path, j.dump(2) + "\n");
}

void write_trajectory_csv(const std::string& path, const SmoothedTrajectory& traj) {
    const size_t n_levels = traj.forward.empty() ? 0 : traj.forward.front().size();
    const SummarySeries sf = summarize(traj.forward);
    const SummarySeries sb = summarize(traj.backward);
    const SummarySeries sp = summarize(traj.pqs);

    std::string out;
    out.reserve(traj.times.size() * (n_levels * 3 + 10) * 20 + 1024);
    out += "t_seconds";
    const char* blocks[3] = {"p_fwd_", "p_bwd_", "p_pqs_"};
    for (const char* b : blocks)
        for (size_t n = 0; n < n_levels; ++n) out += std::string(",") + b + std::to_string(n);
    out += ",mean_fwd,std_fwd,map_fwd,mean_bwd,std_bwd,map_bwd,mean_pqs,std_pqs,map_pqs\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]);
        for (const auto* dists : {&traj.forward, &traj.backward, &traj.pqs})
            for (const double p : (*dists)[i]) {
                out += ',';
                out += format_double(p);
            }
        for (const auto* s : {&sf, &sb, &sp}) {
            out += ',';
            out += format_double(s->mean_n[i]);
            out += ',';
            out += format_double(s->std_n[i]);
            out += ',';
            out += std::to_string(s->map_n[i]);
        }
        out += '\n';
    }
    atomic_write_file(path, out);
}

void write_experiment1_csv(const std::string& path, const EnsembleResult& result) {
    std::string out = "t_seconds,sigma_fwd,sigma_bwd,sigma_pqs\n";
    out.reserve(result.times.size() * 80 + 64);
    for (size_t i = 0; i < result.times.size(); ++i) {
        out += format_double(result.times[i]);
        out += ',';
        out += format_double(result.avg_std_forward[i]);
        out += ',';
        out += format_double(result.avg_std_backward[i]);
        out += ',';
        out += format_double(result.avg_std_pqs[i]);
        out += '\n';
    }
    atomic_write_file(path, out);
}

void write_experiment2_csv(const std::string& path, const EnsembleResult& result,
                           const ExpFit& fit) {
    std::string out = "t_seconds,mean_fwd,mean_bwd,mean_pqs,fit_value\n";
    out.reserve(result.times.size() * 100 + 64);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < result.times.size(); ++i) {
        const double t = result.times[i];
        out += format_double(t);
        out += ',';
        out += format_double(result.avg_mean_forward[i]);
        out += ',';
        out += format_double(result.avg_mean_backward[i]);
        out += ',';
        out += format_double(result.avg_mean_pqs[i]);
        out += ',';
        out += format_double(t >= 0.0 ? fit_value(fit, t) : nan);
        out += '\n';
    }
    atomic_write_file(path, out);
}

void write_experiment_sidecar(const std::string& path, const EnsembleResult& result,
                              std::uint64_t root_seed, const ExpFit* fit,
                              const JumpWindow* window) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["root_seed"] = root_seed;
    j["n_simulated"] = result.n_simulated;
    j["n_realizations"] = result.n_realizations;
    j["failures"] = result.failures;
    if (result.n_simulated > result.n_realizations || !result.jump_times_pqs.empty() ||
        result.emission_probability > 0.0) {
        j["emission_probability"] = result.emission_probability;
        j["selection_fraction"] = result.selection_fraction;
        j["predicted_amplitude"] = result.predicted_amplitude;
        const struct {
            const char* name;
            const std::vector<double>* times;
            const std::vector<double>* curve;
        } analyses[3] = {
            {"forward", &result.jump_times_forward, &result.avg_mean_forward},
            {"backward", &result.jump_times_backward, &result.avg_mean_backward},
            {"pqs", &result.jump_times_pqs, &result.avg_mean_pqs},
        };
        for (const auto& a : analyses) {
            const JumpStats st = jump_stats(*a.times);
            const std::string suffix = std::string("_") + a.name;
            j["jump_time_count" + suffix] = st.count;
            j["jump_time_mean" + suffix] = st.mean;
            j["jump_time_std" + suffix] = st.stddev;
            std::optional<double> crossing;
            if (window)
                crossing = windowed_crossing(result.times, *a.curve, 0.5,
                                             CrossingDirection::rising, -window->before,
                                             window->after);
            if (crossing)
                j["curve_crossing" + suffix] = *crossing;
            else
                j["curve_crossing" + suffix] = nullptr;
        }
        if (window) {
            j["jump_window_before"] = window->before;
            j["jump_window_after"] = window->after;
        }
    }
    if (fit) {
        j["fit_amplitude"] = fit->amplitude;
        j["fit_decay_time"] = fit->decay_time;
        j["fit_offset"] = fit->offset;
        j["fit_window_start"] = fit->fit_window_start;
        j["fit_residual_rms"] = fit->residual_rms;
    }
    atomic_write_file(path, j.dump(2) + "\n");
}

} // namespace pqs
