#pragma once

namespace cvmw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cvmw
