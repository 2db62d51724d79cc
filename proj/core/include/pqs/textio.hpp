#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqs {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

// Strict parsers: the whole string must be consumed, otherwise nullopt.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_i64(std::string_view s);
std::optional<unsigned long long> parse_u64(std::string_view s);
std::optional<int> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on every separator, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

std::string read_text_file(const std::string& path);

// Writes to a sibling temp file and renames over the target, so readers
// never observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content);

} // namespace pqs
