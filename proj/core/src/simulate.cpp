#include "pqs/simulate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pqs/errors.hpp"

namespace pqs {

InitialState InitialState::coherent(double mean) {
    InitialState s;
    s.kind = InitialStateKind::coherent;
    s.coherent_mean = mean;
    return s;
}

InitialState InitialState::thermal() {
    InitialState s;
    s.kind = InitialStateKind::thermal;
    return s;
}

InitialState InitialState::fock(int n) {
    InitialState s;
    s.kind = InitialStateKind::fock;
    s.fock_n = n;
    return s;
}

double poisson_tail_above(double mean, int k) {
    if (k < 0) return 1.0;
    if (!(mean > 0.0)) return 0.0;
    double pmf = std::exp(-mean);
    double cdf = pmf;
    for (int i = 1; i <= k; ++i) {
        pmf *= mean / i;
        cdf += pmf;
    }
    return std::max(0.0, 1.0 - cdf);
}

std::vector<std::string> validate(const SimConfig& config) {
    std::vector<std::string> errs = validate(config.model);
    if (config.n_samples_total < 1) errs.push_back("n_samples must be at least 1");
    if (config.injection) {
        const auto& inj = *config.injection;
        if (inj.at_sample < 0 || inj.at_sample >= config.n_samples_total)
            errs.push_back("injection_sample must lie in [0, n_samples)");
        if (inj.emission_probability &&
            !(*inj.emission_probability >= 0.0 && *inj.emission_probability <= 1.0))
            errs.push_back("emission_probability must lie in [0, 1]");
    }
    switch (config.initial_state.kind) {
        case InitialStateKind::coherent: {
            const double mean = config.initial_state.coherent_mean;
            if (!(mean >= 0.0) || !std::isfinite(mean)) {
                errs.push_back("coherent mean must be finite and nonnegative");
            } else if (poisson_tail_above(mean, truth_cap(config.model) - 3) >= 1e-6) {
                errs.push_back("coherent mean puts more than 1e-6 mass near the top of the "
                               "photon ladder; raise n_max or lower the mean");
            }
            break;
        }
        case InitialStateKind::fock:
            if (config.initial_state.fock_n < 0 || config.initial_state.fock_n >= config.model.n_max)
                errs.push_back("fock initial state must lie in [0, n_max)");
            break;
        case InitialStateKind::thermal:
            break;
    }
    return errs;
}

void require_valid(const SimConfig& config) {
    auto errs = validate(config);
    if (errs.empty()) return;
    std::ostringstream msg;
    msg << "invalid simulation config:";
    for (const auto& e : errs) msg << "\n  " << e;
    throw ConfigError(msg.str());
}

int InjectionDraw::injected_photons() const {
    int count = 0;
    for (unsigned char e : emitted) count += e != 0;
    return count;
}

Sample InjectionDraw::to_sample(int phase_index) const {
    Sample sample;
    sample.resonant_injection = true;
    for (int a = 0; a < true_atoms; ++a) {
        if (!detected[static_cast<size_t>(a)]) continue;
        const Outcome o = emitted[static_cast<size_t>(a)] ? Outcome::g : Outcome::e;
        sample.detections.push_back({o, phase_index});
    }
    return sample;
}

InjectionDraw draw_injection(const SimConfig& config, Rng& rng) {
    if (!config.injection) throw ConfigError("draw_injection: no injection configured");
    if (!config.injection->emission_probability)
        throw ConfigError("draw_injection: emission probability not resolved");
    const double q = *config.injection->emission_probability;
    const double eff = config.model.detection_efficiency;

    InjectionDraw draw;
    draw.true_atoms = rng.poisson(config.model.mean_atoms_per_sample);
    draw.emitted.resize(static_cast<size_t>(draw.true_atoms));
    draw.detected.resize(static_cast<size_t>(draw.true_atoms));
    for (int a = 0; a < draw.true_atoms; ++a) {
        draw.emitted[static_cast<size_t>(a)] = rng.bernoulli(q) ? 1 : 0;
        draw.detected[static_cast<size_t>(a)] = rng.bernoulli(eff) ? 1 : 0;
    }
    return draw;
}

namespace {

int draw_initial_n(const SimConfig& config, Rng& rng) {
    switch (config.initial_state.kind) {
        case InitialStateKind::coherent:
            return rng.poisson(config.initial_state.coherent_mean);
        case InitialStateKind::thermal: {
            const double nb = config.model.n_thermal;
            return rng.geometric(nb / (1.0 + nb));
        }
        case InitialStateKind::fock:
            return config.initial_state.fock_n;
    }
    return 0;
}

[[noreturn]] void throw_ladder_overflow(double t) {
    throw NumericalError("photon trajectory reached the top of the truth ladder at t = " +
                         std::to_string(t) + " s");
}

} // namespace

TruthTrajectory simulate_truth(const SimConfig& config, Rng& rng, int injected_photons) {
    const int cap = truth_cap(config.model);
    const double kappa = config.model.kappa();
    const double nb = config.model.n_thermal;
    const double duration = config.n_samples_total * config.model.t_sample;

    TruthTrajectory truth;
    truth.initial_n = draw_initial_n(config, rng);
    if (truth.initial_n >= cap - 1) throw_ladder_overflow(0.0);

    double t_inject = -1.0;
    if (config.injection && injected_photons > 0)
        t_inject = (config.injection->at_sample + 0.5) * config.model.t_sample;

    double t = 0.0;
    int n = truth.initial_n;
    bool injection_pending = t_inject >= 0.0;
    auto push_jump = [&truth](double when, int level) {
        truth.jump_times.push_back(when);
        truth.photon_numbers.push_back(level);
    };
    while (true) {
        const double down = kappa * (1.0 + nb) * n;
        const double up = kappa * nb * (n + 1);
        const double total = down + up;
        double t_next = std::numeric_limits<double>::infinity();
        double u_direction = 0.0;
        if (total > 0.0) {
            // draw the direction before any injection branch so the stream
            // stays aligned with the event sequence
            const double wait = rng.exponential(total);
            u_direction = rng.uniform();
            t_next = t + wait;
        }
        if (injection_pending && t_next > t_inject) {
            // injected jumps preempt the scheduled event; memorylessness
            // makes discarding it exact
            t = t_inject;
            for (int j = 0; j < injected_photons; ++j) {
                if (n + 1 >= cap - 1) throw_ladder_overflow(t);
                push_jump(t, ++n);
            }
            injection_pending = false;
            continue;
        }
        if (!(t_next < duration)) break;
        t = t_next;
        if (u_direction < down / total) {
            push_jump(t, --n);
        } else {
            if (n + 1 >= cap - 1) throw_ladder_overflow(t);
            push_jump(t, ++n);
        }
    }
    return truth;
}

DetectionRecord generate_record(const SimConfig& config, const TruthTrajectory& truth, Rng& rng,
                                const InjectionDraw* injection) {
    const ModelParams& model = config.model;
    const int S = config.n_samples_total;
    const int n_phases = static_cast<int>(model.phases.size());
    if (config.injection && injection == nullptr)
        throw ConfigError("generate_record: injection configured but no draw supplied");

    DetectionRecord record;
    record.model_snapshot = model;
    record.seed = config.seed;
    record.injection = config.injection;
    record.truth = truth;
    record.samples.reserve(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s) {
        const int phase_index = s % n_phases;
        if (config.injection && s == config.injection->at_sample) {
            record.samples.push_back(injection->to_sample(phase_index));
            continue;
        }
        Sample sample;
        const int atoms = rng.poisson(model.mean_atoms_per_sample);
        const int n_true = truth.n_at((s + 1) * model.t_sample);
        const double phase = model.phases[static_cast<size_t>(phase_index)];
        for (int a = 0; a < atoms; ++a) {
            if (!rng.bernoulli(model.detection_efficiency)) continue;
            const double pg = fringe_value(model, Outcome::g, phase, n_true);
            const Outcome o = rng.bernoulli(pg) ? Outcome::g : Outcome::e;
            sample.detections.push_back({o, phase_index});
        }
        record.samples.push_back(std::move(sample));
    }
    return record;
}

DetectionRecord simulate_record(const SimConfig& config) {
    require_valid(config);
    Rng rng(config.seed);
    if (config.injection) {
        const InjectionDraw draw = draw_injection(config, rng);
        const TruthTrajectory truth = simulate_truth(config, rng, draw.injected_photons());
        return generate_record(config, truth, rng, &draw);
    }
    const TruthTrajectory truth = simulate_truth(config, rng);
    return generate_record(config, truth, rng);
}

bool is_single_g(const DetectionRecord& record, int injection_sample) {
    if (injection_sample < 0 || static_cast<size_t>(injection_sample) >= record.samples.size())
        return false;
    int n_g = 0, n_e = 0;
    for (const auto& det : record.samples[static_cast<size_t>(injection_sample)].detections)
        (det.outcome == Outcome::g ? n_g : n_e) += 1;
    return n_g == 1 && n_e == 0;
}

std::vector<DetectionRecord> select_single_g(const std::vector<DetectionRecord>& records,
                                             int injection_sample) {
    std::vector<DetectionRecord> selected;
    for (const auto& r : records)
        if (is_single_g(r, injection_sample)) selected.push_back(r);
    return selected;
}

} // namespace pqs
