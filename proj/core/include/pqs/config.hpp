#pragma once

#include <string>
#include <string_view>

#include "pqs/simulate.hpp"

namespace pqs {

// Flat key-value config, one "key value" pair per line, '#' comments and
// blank lines allowed, SI units throughout. Unspecified keys keep their
// defaults. Keys: n_max, phi0, fringe_offset, fringe_contrast, phases
// (comma-separated radians), t_sample, t_cavity, n_thermal,
// detection_efficiency, mean_atoms_per_sample, initial_state ("thermal",
// "coherent <mean>" or "fock <n>"), n_samples, injection_sample,
// emission_probability, seed. Parsing is strict: unknown or duplicate keys
// are errors with line numbers; semantic validation is separate.
SimConfig sim_config_from_string(std::string_view text, const std::string& origin);

SimConfig load_sim_config(const std::string& path);

// Canonical config text for a config value; parses back to the same value.
std::string sim_config_to_string(const SimConfig& config);

} // namespace pqs
