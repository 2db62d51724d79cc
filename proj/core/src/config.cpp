#include "pqs/config.hpp"

#include <map>
#include <string>

#include "pqs/errors.hpp"
#include "pqs/textio.hpp"

namespace pqs {

SimConfig sim_config_from_string(std::string_view text, const std::string& origin) {
    SimConfig config;
    ModelParams& m = config.model;
    std::optional<int> injection_sample;
    std::optional<double> emission_probability;
    std::map<std::string, bool> seen;
    std::map<std::string, double*> double_fields = {
        {"phi0", &m.phi0},
        {"fringe_offset", &m.fringe_offset},
        {"fringe_contrast", &m.fringe_contrast},
        {"t_sample", &m.t_sample},
        {"t_cavity", &m.t_cavity},
        {"n_thermal", &m.n_thermal},
        {"detection_efficiency", &m.detection_efficiency},
        {"mean_atoms_per_sample", &m.mean_atoms_per_sample},
    };

    const auto lines = split(text, '\n');
    for (size_t i = 0; i < lines.size(); ++i) {
        const auto fail = [&](const std::string& what) -> void {
            throw ParseError(origin, static_cast<int>(i) + 1, what);
        };
        const std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const size_t sp = line.find(' ');
        if (sp == std::string_view::npos) fail("line is not 'key value'");
        const std::string key(line.substr(0, sp));
        const std::string_view value = trim(line.substr(sp + 1));
        if (seen[key]) fail("duplicate key '" + key + "'");
        seen[key] = true;

        if (auto it = double_fields.find(key); it != double_fields.end()) {
            const auto v = parse_double(value);
            if (!v) fail("cannot parse number for '" + key + "'");
            *it->second = *v;
        } else if (key == "n_max" || key == "n_samples" || key == "injection_sample") {
            const auto v = parse_int(value);
            if (!v) fail("cannot parse integer for '" + key + "'");
            if (key == "n_max") m.n_max = *v;
            if (key == "n_samples") config.n_samples_total = *v;
            if (key == "injection_sample") injection_sample = *v;
        } else if (key == "emission_probability") {
            const auto v = parse_double(value);
            if (!v) fail("cannot parse emission_probability");
            emission_probability = *v;
        } else if (key == "seed") {
            const auto v = parse_u64(value);
            if (!v) fail("cannot parse seed");
            config.seed = *v;
        } else if (key == "phases") {
            m.phases.clear();
            for (const auto field : split(value, ',')) {
                const auto v = parse_double(trim(field));
                if (!v) fail("cannot parse phases list");
                m.phases.push_back(*v);
            }
        } else if (key == "initial_state") {
            const auto fields = split(value, ' ');
            if (fields.size() == 1 && fields[0] == "thermal") {
                config.initial_state = InitialState::thermal();
            } else if (fields.size() == 2 && fields[0] == "coherent") {
                const auto mean = parse_double(trim(fields[1]));
                if (!mean) fail("cannot parse coherent mean");
                config.initial_state = InitialState::coherent(*mean);
            } else if (fields.size() == 2 && fields[0] == "fock") {
                const auto n = parse_int(trim(fields[1]));
                if (!n) fail("cannot parse fock level");
                config.initial_state = InitialState::fock(*n);
            } else {
                fail("initial_state must be 'thermal', 'coherent <mean>' or 'fock <n>'");
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    if (emission_probability && !injection_sample)
        throw ParseError(origin, static_cast<int>(lines.size()),
                         "emission_probability requires injection_sample");
    if (injection_sample) {
        InjectionSettings inj;
        inj.at_sample = *injection_sample;
        inj.emission_probability = emission_probability;
        config.injection = inj;
    }
    return config;
}

SimConfig load_sim_config(const std::string& path) {
    return sim_config_from_string(read_text_file(path), path);
}

std::string sim_config_to_string(const SimConfig& config) {
    const ModelParams& m = config.model;
    std::string out;
    out += "n_max " + std::to_string(m.n_max) + '\n';
    out += "phi0 " + format_double(m.phi0) + '\n';
    out += "fringe_offset " + format_double(m.fringe_offset) + '\n';
    out += "fringe_contrast " + format_double(m.fringe_contrast) + '\n';
    out += "phases ";
    for (size_t i = 0; i < m.phases.size(); ++i) {
        if (i) out += ',';
        out += format_double(m.phases[i]);
    }
    out += '\n';
    out += "t_sample " + format_double(m.t_sample) + '\n';
    out += "t_cavity " + format_double(m.t_cavity) + '\n';
    out += "n_thermal " + format_double(m.n_thermal) + '\n';
    out += "detection_efficiency " + format_double(m.detection_efficiency) + '\n';
    out += "mean_atoms_per_sample " + format_double(m.mean_atoms_per_sample) + '\n';
    switch (config.initial_state.kind) {
        case InitialStateKind::thermal:
            out += "initial_state thermal\n";
            break;
        case InitialStateKind::coherent:
            out += "initial_state coherent " + format_double(config.initial_state.coherent_mean) +
                   '\n';
            break;
        case InitialStateKind::fock:
            out += "initial_state fock " + std::to_string(config.initial_state.fock_n) + '\n';
            break;
    }
    out += "n_samples " + std::to_string(config.n_samples_total) + '\n';
    if (config.injection) {
        out += "injection_sample " + std::to_string(config.injection->at_sample) + '\n';
        if (config.injection->emission_probability)
            out += "emission_probability " +
                   format_double(*config.injection->emission_probability) + '\n';
    }
    out += "seed " + std::to_string(config.seed) + '\n';
    return out;
}

} // namespace pqs
