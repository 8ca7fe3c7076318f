#pragma once

namespace sdd {

inline constexpr const char* kToolName = "sd-decide";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sdd
