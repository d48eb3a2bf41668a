#pragma once

namespace csl {

inline constexpr const char* tool_name = "csl";
inline constexpr const char* version_string = "0.1.0";

}  // namespace csl
