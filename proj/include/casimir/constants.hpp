#pragma once

#include <numbers>

namespace casimir {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018; c is exact by definition.
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double c_light = 299792458.0;   // m / s
inline constexpr double hbar_c = hbar * c_light; // J m

}  // namespace casimir
