#pragma once

namespace smooco {

inline constexpr const char* kToolName = "smooco";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace smooco
