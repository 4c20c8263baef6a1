#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "stsm/constants.hpp"
#include "stsm/dispersion.hpp"
#include "stsm/errors.hpp"
#include "stsm/grid.hpp"
#include "stsm/parallel.hpp"

namespace stsm {

/// Gaussian pump of the low-gain model.
struct PumpLowGain {
  double lambda_p0 = 0.0;    ///< central wavelength (m)
  double waist = 0.0;        ///< beam waist w_p (m)
  double delta_lambda = 0.0; ///< bandwidth in wavelength (m)

  double omega_p0() const { return angular_frequency(lambda_p0); }
  /// Delta omega_p = Delta lambda_p * omega_p0 / lambda_p0.
  double delta_omega() const { return delta_lambda * omega_p0() / lambda_p0; }

  void validate() const {
    if (!(lambda_p0 > 0.0 && waist > 0.0 && delta_lambda > 0.0))
      throw ConfigError("pump: lambda_p0, waist and delta_lambda must be positive");
  }
};

/// A_p(q_p, omega_p) = exp(-q_p^2 w_p^2 / 4) exp(-(omega_p - omega_p0)^2 / Delta omega_p^2).
inline double pump_amplitude(double q_p, double omega_p, const PumpLowGain& pump) {
  const double dw = (omega_p - pump.omega_p0()) / pump.delta_omega();
  return std::exp(-0.25 * q_p * q_p * pump.waist * pump.waist) * std::exp(-dw * dw);
}

/// |q_s + q_i| for radial magnitudes q_s, q_i separated by azimuth delta_phi.
/// Symmetric in (q_s, q_i) bit for bit.
inline double pump_q_magnitude(double q_s, double q_i, double delta_phi) {
  const double sq = q_s * q_s + q_i * q_i + 2.0 * (q_s * q_i) * std::cos(delta_phi);
  return std::sqrt(std::max(0.0, sq));
}

/// Reduced wavefunction Psi(q_s, w_s, q_i, w_i, dphi) on a grid.
///
/// Storage is row-major over (signal flat index, idler flat index, dphi) with
/// dphi fastest. After normalisation the full six-dimensional norm
///   2 pi * sum_j dphi * sum_{s,i} w_s w_i |Psi|^2
/// equals one; the leading 2 pi is the integral over the common rotation angle.
struct BiphotonTensor {
  GridSpec grid;
  std::vector<cplx> values;
  double raw_norm = 0.0; ///< squared norm before normalisation

  BiphotonTensor() = default;
  explicit BiphotonTensor(GridSpec g) : grid(std::move(g)) {
    values.assign(grid.flat_size() * grid.flat_size() * grid.m(), cplx{});
  }

  std::size_t index(std::size_t s, std::size_t i, std::size_t j) const {
    return (s * grid.flat_size() + i) * grid.m() + j;
  }
  cplx& at(std::size_t s, std::size_t i, std::size_t j) { return values[index(s, i, j)]; }
  const cplx& at(std::size_t s, std::size_t i, std::size_t j) const { return values[index(s, i, j)]; }

  /// Squared norm under the polar measure.
  double squared_norm() const {
    const auto w = grid.flat_weights();
    const std::size_t n = grid.flat_size();
    const std::size_t m = grid.m();
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        const cplx* p = &values[index(s, i, 0)];
        for (std::size_t j = 0; j < m; ++j) row += std::norm(p[j]);
        total += w[s] * w[i] * row;
      }
    }
    return two_pi * grid.dphi * total;
  }

  /// Rescales to unit norm; records the previous norm in raw_norm.
  void normalize() {
    raw_norm = squared_norm();
    if (!(raw_norm > 0.0) || !std::isfinite(raw_norm))
      throw DomainError("biphoton: state has zero or non-finite norm on this grid");
    const double scale = 1.0 / std::sqrt(raw_norm);
    for (auto& v : values) v *= scale;
  }
};

/// Fills a tensor from amplitude(q_s, w_s, q_i, w_i, dphi) at every grid point
/// and normalises it. No symmetry is assumed.
template <typename Amplitude>
BiphotonTensor build_state(const GridSpec& grid, Amplitude&& amplitude, std::size_t workers = 1) {
  BiphotonTensor psi(grid);
  const std::size_t n = grid.flat_size();
  parallel_for(n, workers, [&](std::size_t s) {
    const double qs = grid.q[grid.q_index(s)];
    const double ws = grid.omega[grid.omega_index(s)];
    for (std::size_t i = 0; i < n; ++i) {
      const double qi = grid.q[grid.q_index(i)];
      const double wi = grid.omega[grid.omega_index(i)];
      for (std::size_t j = 0; j < grid.m(); ++j) psi.at(s, i, j) = amplitude(qs, ws, qi, wi, grid.phi[j]);
    }
  });
  psi.normalize();
  return psi;
}

/// Low-gain SPDC amplitude A_p(|q_s + q_i|, w_s + w_i) sinc(dk L/2) exp(i dk L/2).
///
/// Each value is computed once for s <= i and 0 <= j <= M/2 and mirrored, so
/// the tensor is exactly even in dphi and exactly exchange symmetric. Throws
/// DomainError naming the point if any leg is evanescent.
inline BiphotonTensor build_wavefunction(const GridSpec& grid, const PumpLowGain& pump,
                                         const CrystalConfig& crystal, std::size_t workers = 1) {
  pump.validate();
  crystal.validate();
  BiphotonTensor psi(grid);
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  std::vector<double> cos_phi(m);
  for (std::size_t j = 0; j <= m / 2; ++j) {
    cos_phi[j] = std::cos(grid.phi[j]);
    cos_phi[(m - j) % m] = cos_phi[j];
  }
  const double half_length = 0.5 * crystal.length;

  parallel_for(n, workers, [&](std::size_t s) {
    const double qs = grid.q[grid.q_index(s)];
    const double ws = grid.omega[grid.omega_index(s)];
    for (std::size_t i = s; i < n; ++i) {
      const double qi = grid.q[grid.q_index(i)];
      const double wi = grid.omega[grid.omega_index(i)];
      const double wp = ws + wi;
      for (std::size_t j = 0; j <= m / 2; ++j) {
        const double qp2 = qs * qs + qi * qi + 2.0 * (qs * qi) * cos_phi[j];
        const double qp = std::sqrt(std::max(0.0, qp2));
        double dk = 0.0;
        try {
          dk = delta_kz(qp, qs, qi, ws, wi, crystal);
        } catch (const DomainError& e) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "biphoton grid point (q_s=" << qs << ", w_s=" << ws << ", q_i=" << qi << ", w_i=" << wi
              << ", dphi=" << grid.phi[j] << "): " << e.what()
              << " -- reduce q_max or the frequency window";
          throw DomainError(msg.str());
        }
        const double x = dk * half_length;
        const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
        const cplx value = pump_amplitude(qp, wp, pump) * sinc * std::polar(1.0, x);
        const std::size_t jm = (m - j) % m;
        psi.at(s, i, j) = value;
        psi.at(s, i, jm) = value;
        psi.at(i, s, j) = value;
        psi.at(i, s, jm) = value;
      }
    }
  });
  psi.normalize();
  return psi;
}

/// I(q_s, w_s) = sum over (q_i, w_i, dphi) of |Psi|^2 with the polar measure.
/// Integrates to one against 2 pi q dq domega. Indexed by signal flat index.
inline std::vector<double> marginal_intensity(const BiphotonTensor& psi) {
  const auto& grid = psi.grid;
  const auto w = grid.flat_weights();
  const std::size_t n = grid.flat_size();
  std::vector<double> out(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < grid.m(); ++j) row += std::norm(psi.at(s, i, j));
      acc += w[i] * row;
    }
    out[s] = grid.dphi * acc;
  }
  return out;
}

/// Largest |Psi|^2 on the outer edge of the window (last q sample or first/last
/// frequency sample of either photon) relative to the global peak of |Psi|^2.
inline double window_boundary_ratio(const BiphotonTensor& psi) {
  const auto& grid = psi.grid;
  const std::size_t n = grid.flat_size();
  auto on_edge = [&](std::size_t f) {
    const std::size_t iq = grid.q_index(f);
    const std::size_t iw = grid.omega_index(f);
    return iq + 1 == grid.nq() || (grid.nw() > 1 && (iw == 0 || iw + 1 == grid.nw()));
  };
  double peak = 0.0;
  double edge = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const bool s_edge = on_edge(s);
    for (std::size_t i = 0; i < n; ++i) {
      const bool any_edge = s_edge || on_edge(i);
      for (std::size_t j = 0; j < grid.m(); ++j) {
        const double v = std::norm(psi.at(s, i, j));
        peak = std::max(peak, v);
        if (any_edge) edge = std::max(edge, v);
      }
    }
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

} // namespace stsm
