#pragma once

#include <complex>
#include <numbers>

namespace diffsense {

using Complex = std::complex<double>;
using ComplexF = std::complex<float>;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace diffsense
