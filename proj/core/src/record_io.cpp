#include "pqs/record_io.hpp"

#include <map>
#include <string>

#include "pqs/errors.hpp"
#include "pqs/textio.hpp"

namespace pqs {

namespace {

constexpr std::string_view kMagic = "pqs-record 1";

int sample_phase_index(const Sample& sample, int scheduled, const std::string& context) {
    if (sample.detections.empty()) return scheduled;
    const int phase = sample.detections.front().phase_index;
    for (const auto& det : sample.detections)
        if (det.phase_index != phase)
            throw IoError("record format holds one phase per sample row; " + context +
                          " mixes phases");
    return phase;
}

} // namespace

std::string record_to_string(const DetectionRecord& record) {
    const ModelParams& m = record.model_snapshot;
    const int n_phases = static_cast<int>(m.phases.size());
    std::string out;
    out.reserve(64 * record.samples.size() / 8 + 512);
    out += kMagic;
    out += '\n';
    out += "seed " + std::to_string(record.seed) + '\n';
    out += "n_samples " + std::to_string(record.samples.size()) + '\n';
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
    if (record.injection) {
        out += "injection_sample " + std::to_string(record.injection->at_sample) + '\n';
        if (record.injection->emission_probability)
            out += "emission_probability " +
                   format_double(*record.injection->emission_probability) + '\n';
    }
    if (record.truth) {
        out += "truth_initial_n " + std::to_string(record.truth->initial_n) + '\n';
        out += "truth_jumps " + std::to_string(record.truth->jump_times.size()) + '\n';
        for (size_t j = 0; j < record.truth->jump_times.size(); ++j)
            out += format_double(record.truth->jump_times[j]) + ' ' +
                   std::to_string(record.truth->photon_numbers[j]) + '\n';
    }
    out += "samples\n";
    for (size_t s = 0; s < record.samples.size(); ++s) {
        const Sample& sample = record.samples[s];
        const int scheduled = n_phases > 0 ? static_cast<int>(s) % n_phases : 0;
        const int phase =
            sample_phase_index(sample, scheduled, "sample " + std::to_string(s));
        out += std::to_string(s);
        out += ',';
        out += std::to_string(phase);
        out += ',';
        for (const auto& det : sample.detections) out += outcome_char(det.outcome);
        out += '\n';
    }
    return out;
}

namespace {

struct LineReader {
    std::vector<std::string_view> lines;
    const std::string& origin;
    size_t next = 0; // 0-based

    [[noreturn]] void fail(size_t line_index, const std::string& what) const {
        throw ParseError(origin, static_cast<int>(line_index) + 1, what);
    }
};

} // namespace

DetectionRecord record_from_string(std::string_view text, const std::string& origin) {
    LineReader rd{split(text, '\n'), origin, 0};
    if (rd.lines.empty() || trim(rd.lines[0]) != kMagic)
        rd.fail(0, "not a record file (expected first line '" + std::string(kMagic) + "')");
    rd.next = 1;

    DetectionRecord record;
    ModelParams& m = record.model_snapshot;
    m.phases.clear();
    std::optional<long long> n_samples, n_max, injection_sample, truth_initial_n;
    std::optional<double> emission_probability;
    std::optional<TruthTrajectory> truth;
    std::map<std::string, bool> seen;
    bool seed_seen = false, phases_seen = false;
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

    size_t samples_line = 0;
    bool in_header = true;
    while (in_header) {
        if (rd.next >= rd.lines.size()) rd.fail(rd.lines.size() - 1, "missing 'samples' marker");
        const size_t here = rd.next++;
        const std::string_view line = trim(rd.lines[here]);
        if (line.empty() || line.front() == '#') continue;
        if (line == "samples") {
            samples_line = here;
            in_header = false;
            break;
        }
        const size_t sp = line.find(' ');
        if (sp == std::string_view::npos) rd.fail(here, "header line is not 'key value'");
        const std::string key(line.substr(0, sp));
        const std::string_view value = trim(line.substr(sp + 1));
        if (seen[key]) rd.fail(here, "duplicate header key '" + key + "'");
        seen[key] = true;

        if (auto it = double_fields.find(key); it != double_fields.end()) {
            const auto v = parse_double(value);
            if (!v) rd.fail(here, "cannot parse number for '" + key + "'");
            *it->second = *v;
        } else if (key == "seed") {
            const auto v = parse_u64(value);
            if (!v) rd.fail(here, "cannot parse seed");
            record.seed = *v;
            seed_seen = true;
        } else if (key == "n_samples" || key == "n_max" || key == "injection_sample" ||
                   key == "truth_initial_n") {
            const auto v = parse_i64(value);
            if (!v || *v < 0) rd.fail(here, "cannot parse nonnegative integer for '" + key + "'");
            if (key == "n_samples") n_samples = *v;
            if (key == "n_max") n_max = *v;
            if (key == "injection_sample") injection_sample = *v;
            if (key == "truth_initial_n") truth_initial_n = *v;
        } else if (key == "emission_probability") {
            const auto v = parse_double(value);
            if (!v) rd.fail(here, "cannot parse emission_probability");
            emission_probability = *v;
        } else if (key == "phases") {
            for (const auto field : split(value, ',')) {
                const auto v = parse_double(trim(field));
                if (!v) rd.fail(here, "cannot parse phases list");
                m.phases.push_back(*v);
            }
            phases_seen = true;
        } else if (key == "truth_jumps") {
            const auto count = parse_i64(value);
            if (!count || *count < 0) rd.fail(here, "cannot parse truth_jumps count");
            TruthTrajectory tt;
            for (long long j = 0; j < *count; ++j) {
                if (rd.next >= rd.lines.size()) rd.fail(rd.lines.size() - 1, "truncated truth section");
                const size_t jl = rd.next++;
                const auto fields = split(trim(rd.lines[jl]), ' ');
                if (fields.size() != 2) rd.fail(jl, "truth jump line is not 'time photon_number'");
                const auto t = parse_double(fields[0]);
                const auto n = parse_i64(fields[1]);
                if (!t || !n || *n < 0) rd.fail(jl, "cannot parse truth jump");
                if (!tt.jump_times.empty() && *t < tt.jump_times.back())
                    rd.fail(jl, "truth jump times must be nondecreasing");
                tt.jump_times.push_back(*t);
                tt.photon_numbers.push_back(static_cast<int>(*n));
            }
            truth = std::move(tt);
        } else {
            rd.fail(here, "unknown header key '" + key + "'");
        }
    }

    std::string missing;
    auto need = [&](bool ok, const char* name) {
        if (!ok) missing += missing.empty() ? name : (std::string(", ") + name);
    };
    need(seed_seen, "seed");
    need(n_samples.has_value(), "n_samples");
    need(n_max.has_value(), "n_max");
    need(seen.count("phi0") != 0, "phi0");
    need(seen.count("fringe_offset") != 0, "fringe_offset");
    need(seen.count("fringe_contrast") != 0, "fringe_contrast");
    need(phases_seen, "phases");
    need(seen.count("t_sample") != 0, "t_sample");
    need(seen.count("t_cavity") != 0, "t_cavity");
    need(seen.count("n_thermal") != 0, "n_thermal");
    need(seen.count("detection_efficiency") != 0, "detection_efficiency");
    need(seen.count("mean_atoms_per_sample") != 0, "mean_atoms_per_sample");
    if (!missing.empty()) rd.fail(samples_line, "missing header keys: " + missing);
    if (emission_probability && !injection_sample)
        rd.fail(samples_line, "emission_probability requires injection_sample");
    if (truth.has_value() != truth_initial_n.has_value())
        rd.fail(samples_line, "truth_initial_n and truth_jumps must appear together");

    m.n_max = static_cast<int>(*n_max);
    if (injection_sample) {
        InjectionSettings inj;
        inj.at_sample = static_cast<int>(*injection_sample);
        inj.emission_probability = emission_probability;
        record.injection = inj;
    }
    if (truth) {
        truth->initial_n = static_cast<int>(*truth_initial_n);
        record.truth = std::move(truth);
    }

    const long long S = *n_samples;
    record.samples.reserve(static_cast<size_t>(S));
    long long row = 0;
    for (; rd.next < rd.lines.size(); ++rd.next) {
        const size_t here = rd.next;
        const std::string_view line = trim(rd.lines[here]);
        if (line.empty() || line.front() == '#') continue;
        if (row >= S) rd.fail(here, "more sample rows than n_samples");
        const auto fields = split(line, ',');
        if (fields.size() != 3) rd.fail(here, "sample row is not 'index,phase_index,outcomes'");
        const auto idx = parse_i64(trim(fields[0]));
        if (!idx || *idx != row) rd.fail(here, "sample row index out of order");
        const auto phase = parse_int(trim(fields[1]));
        if (!phase || *phase < 0 || static_cast<size_t>(*phase) >= m.phases.size())
            rd.fail(here, "phase index out of range");
        Sample sample;
        for (const char ch : trim(fields[2])) {
            if (ch != 'g' && ch != 'e') rd.fail(here, "outcomes must be a g/e string");
            sample.detections.push_back({ch == 'g' ? Outcome::g : Outcome::e, *phase});
        }
        if (record.injection && row == record.injection->at_sample)
            sample.resonant_injection = true;
        record.samples.push_back(std::move(sample));
        ++row;
    }
    if (row != S)
        rd.fail(rd.lines.empty() ? 0 : rd.lines.size() - 1,
                "expected " + std::to_string(S) + " sample rows, found " + std::to_string(row));
    return record;
}

void write_record(const std::string& path, const DetectionRecord& record) {
    atomic_write_file(path, record_to_string(record));
}

DetectionRecord read_record(const std::string& path) {
    return record_from_string(read_text_file(path), path);
}

} // namespace pqs
