#pragma once

namespace mamimo {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuildId = "mamimo-0.1.0";

}  // namespace mamimo
