#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"

namespace stsm {

/// Sellmeier relation of the form
///   n^2(lambda) = a + b / (lambda^2 - c) - d * lambda^2,   lambda in micrometres.
struct SellmeierCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double index(double lambda_um) const {
    const double l2 = lambda_um * lambda_um;
    return std::sqrt(a + b / (l2 - c) - d * l2);
  }

  friend bool operator==(const SellmeierCoefficients&, const SellmeierCoefficients&) = default;
};

/// Ordinary and extraordinary dispersion of a uniaxial crystal together with
/// the wavelength band (micrometres) over which the fit is trusted.
struct SellmeierSet {
  std::string name;
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;
  double band_min_um = 0.0;
  double band_max_um = 0.0;

  /// beta-barium borate, D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
  /// With these coefficients collinear degenerate type-I matching of a 355 nm
  /// pump occurs at theta_p = 32.914 deg.
  static SellmeierSet bbo_eimerl() {
    return SellmeierSet{
        .name = "bbo-eimerl-1987",
        .ordinary = {2.7405, 0.0184, 0.0179, 0.0155},
        .extraordinary = {2.3730, 0.0128, 0.0156, 0.0044},
        .band_min_um = 0.22,
        .band_max_um = 1.6,
    };
  }
};

struct CrystalConfig {
  double theta_p = 0.0; ///< pump propagation angle to the optic axis (rad)
  double length = 0.0;  ///< crystal length L (m)
  SellmeierSet sellmeier = SellmeierSet::bbo_eimerl();

  void validate() const {
    if (!(theta_p > 0.0 && theta_p < pi / 2))
      throw ConfigError("crystal: theta_p must lie in (0, pi/2) rad");
    if (!(length > 0.0)) throw ConfigError("crystal: length must be positive");
    if (!(sellmeier.band_min_um > 0.0 && sellmeier.band_max_um > sellmeier.band_min_um))
      throw ConfigError("crystal: Sellmeier band is empty");
  }
};

namespace detail {

inline void check_band(double lambda_um, const SellmeierSet& set) {
  if (!(lambda_um >= set.band_min_um && lambda_um <= set.band_max_um)) {
    std::ostringstream msg;
    msg << "wavelength " << lambda_um << " um outside the Sellmeier band [" << set.band_min_um
        << ", " << set.band_max_um << "] um of set '" << set.name << "'";
    throw DomainError(msg.str());
  }
}

} // namespace detail

inline double ordinary_index(double lambda_um, const SellmeierSet& set) {
  detail::check_band(lambda_um, set);
  return set.ordinary.index(lambda_um);
}

inline double extraordinary_index(double lambda_um, const SellmeierSet& set) {
  detail::check_band(lambda_um, set);
  return set.extraordinary.index(lambda_um);
}

/// Index seen by an extraordinarily polarised wave travelling at angle theta
/// to the optic axis.
inline double effective_pump_index(double theta, double lambda_um, const SellmeierSet& set) {
  if (!(theta >= 0.0 && theta <= pi / 2))
    throw DomainError("effective_pump_index: theta outside [0, pi/2]");
  const double no = ordinary_index(lambda_um, set);
  const double ne = extraordinary_index(lambda_um, set);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return ne * no / std::sqrt(no * no * s * s + ne * ne * c * c);
}

/// |k| (rad/m) of an ordinary wave of angular frequency omega.
inline double ordinary_wavenumber(double omega, const SellmeierSet& set) {
  return ordinary_index(vacuum_wavelength(omega) * 1e6, set) * omega / speed_of_light;
}

/// |k| (rad/m) of the extraordinary pump of angular frequency omega.
inline double pump_wavenumber(double omega, const CrystalConfig& crystal) {
  return effective_pump_index(crystal.theta_p, vacuum_wavelength(omega) * 1e6, crystal.sellmeier) *
         omega / speed_of_light;
}

namespace detail {

inline double longitudinal(double k, double q, const char* leg, double omega) {
  if (!(q < k)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "evanescent " << leg << " component: q = " << q << " rad/m >= k = " << k
        << " rad/m at omega = " << omega << " rad/s";
    throw DomainError(msg.str());
  }
  return std::sqrt((k - q) * (k + q));
}

} // namespace detail

/// Longitudinal wavevector mismatch k_pz - k_sz - k_iz for pump transverse
/// wavevector magnitude q_p at omega_p = omega_s + omega_i.
///
/// The signal and idler terms enter through a single commutative sum, so
/// swapping (q_s, omega_s) with (q_i, omega_i) reproduces the result bit for bit.
inline double delta_kz(double q_p, double q_s, double q_i, double omega_s, double omega_i,
                       const CrystalConfig& crystal) {
  const double omega_p = omega_s + omega_i;
  const double kpz = detail::longitudinal(pump_wavenumber(omega_p, crystal), q_p, "pump", omega_p);
  const double ksz = detail::longitudinal(ordinary_wavenumber(omega_s, crystal.sellmeier), q_s,
                                          "signal", omega_s);
  const double kiz = detail::longitudinal(ordinary_wavenumber(omega_i, crystal.sellmeier), q_i,
                                          "idler", omega_i);
  return kpz - (ksz + kiz);
}

/// Mismatch at the centre of the pump spectrum: q_i = -q_s, omega_i = omega_p0 - omega_s.
inline double central_delta_kz(double q_s, double omega_s, const CrystalConfig& crystal,
                               double lambda_p0) {
  const double omega_p0 = angular_frequency(lambda_p0);
  const double omega_i = omega_p0 - omega_s;
  const double kp = pump_wavenumber(omega_p0, crystal);
  const double ksz = detail::longitudinal(ordinary_wavenumber(omega_s, crystal.sellmeier), q_s,
                                          "signal", omega_s);
  const double kiz = detail::longitudinal(ordinary_wavenumber(omega_i, crystal.sellmeier), q_s,
                                          "idler", omega_i);
  return kp - (ksz + kiz);
}

} // namespace stsm
