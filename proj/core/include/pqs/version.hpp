#pragma once

namespace pqs {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace pqs
