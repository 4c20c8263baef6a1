#pragma once

#include <complex>
#include <numbers>

namespace stsm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// SI-defined speed of light in vacuum (m/s).
inline constexpr double speed_of_light = 299792458.0;

/// Angular frequency (rad/s) of vacuum wavelength `lambda` (m).
constexpr double angular_frequency(double lambda) { return two_pi * speed_of_light / lambda; }

/// Vacuum wavelength (m) of angular frequency `omega` (rad/s).
constexpr double vacuum_wavelength(double omega) { return two_pi * speed_of_light / omega; }

inline constexpr double degrees_to_radians(double deg) { return deg * pi / 180.0; }

} // namespace stsm
