#pragma once

namespace gpm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpm
