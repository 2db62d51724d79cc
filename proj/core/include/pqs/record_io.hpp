#pragma once

#include <string>
#include <string_view>

#include "pqs/record.hpp"

namespace pqs {

// Plain-text record format, one record per file: a key-value header (model
// snapshot, seed, sample count, optional injection metadata and truth
// section), a "samples" marker, then one "index,phase_index,outcomes" row
// per sample with outcomes as a g/e string (empty when nothing was
// detected). All doubles round-trip exactly.
std::string record_to_string(const DetectionRecord& record);

// origin names the source (file path) in error messages.
DetectionRecord record_from_string(std::string_view text, const std::string& origin);

void write_record(const std::string& path, const DetectionRecord& record);
DetectionRecord read_record(const std::string& path);

} // namespace pqs
