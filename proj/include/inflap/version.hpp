#pragma once

namespace inflap {

inline constexpr const char* kVersion = "0.1.0";

} // namespace inflap
