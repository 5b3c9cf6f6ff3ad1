#pragma once

namespace leray {

inline constexpr const char* kToolName = "lerayflow";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace leray
