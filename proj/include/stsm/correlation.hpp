#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stsm/biphoton.hpp"
#include "stsm/constants.hpp"
#include "stsm/errors.hpp"
#include "stsm/fft.hpp"
#include "stsm/grid.hpp"
#include "stsm/linalg.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

/// Reduced first-order correlation G(q, omega, q', omega', dphi), laid out like
/// BiphotonTensor ([s][s'][dphi], dphi fastest). `scale` is the trace of the
/// tensor before normalisation, i.e. the absolute signal intensity.
struct CorrelationTensor {
  GridSpec grid;
  std::vector<cplx> values;
  double scale = 1.0;

  CorrelationTensor() = default;
  explicit CorrelationTensor(GridSpec g) : grid(std::move(g)) {
    values.assign(grid.flat_size() * grid.flat_size() * grid.m(), cplx{});
  }

  std::size_t index(std::size_t s, std::size_t t, std::size_t j) const {
    return (s * grid.flat_size() + t) * grid.m() + j;
  }
  cplx& at(std::size_t s, std::size_t t, std::size_t j) { return values[index(s, t, j)]; }
  const cplx& at(std::size_t s, std::size_t t, std::size_t j) const { return values[index(s, t, j)]; }

  /// 2 pi sum_s w_s G(s, s, 0).
  double trace() const {
    const auto w = grid.flat_weights();
    double acc = 0.0;
    for (std::size_t s = 0; s < grid.flat_size(); ++s) acc += w[s] * at(s, s, 0).real();
    return two_pi * acc;
  }

  /// Divides by the trace and multiplies it into `scale`.
  void normalize() {
    const double t = trace();
    if (!(t > 0.0) || !std::isfinite(t)) throw NumericalError("correlation tensor has non-positive trace");
    for (auto& v : values) v /= t;
    scale *= t;
  }

  /// Largest |G(s, t, dphi) - conj G(t, s, -dphi)|.
  double hermitian_defect() const {
    const std::size_t n = grid.flat_size();
    const std::size_t m = grid.m();
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < m; ++j)
          worst = std::max(worst, std::abs(at(s, t, j) - std::conj(at(t, s, (m - j) % m))));
    return worst;
  }

  /// G(s, s, 0) by flat index.
  std::vector<double> diagonal() const {
    std::vector<double> d(grid.flat_size());
    for (std::size_t s = 0; s < d.size(); ++s) d[s] = at(s, s, 0).real();
    return d;
  }
};

/// Per-harmonic blocks f_k(s, t) = (1/M) sum_j G(s, t, phi_j) e^{-i k phi_j}, layout [s][t][k].
inline std::vector<cplx> correlation_harmonics(const CorrelationTensor& g1) {
  const std::size_t n = g1.grid.flat_size();
  const std::size_t m = g1.grid.m();
  std::vector<cplx> f(n * n * m);
  batched_dft(g1.values.data(), f.data(), n * n, m, -1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (auto& v : f) v *= inv_m;
  return f;
}

/// Low-gain G from the wavefunction: the idler is traced out and the relative
/// angle convolution becomes a product of azimuthal harmonics,
///   f_k(s, t) = 2 pi sum_i w_i alpha_k(s, i) conj(alpha_k(t, i)),  G = sum_k f_k e^{i k dphi}.
/// The result is normalised to unit trace.
inline CorrelationTensor g1_from_psi(const BiphotonTensor& psi) {
  const auto& grid = psi.grid;
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto alpha = azimuthal_spectrum(psi);
  const auto w = grid.flat_weights();
  Eigen::VectorXd wv(static_cast<Eigen::Index>(n));
  for (std::size_t f = 0; f < n; ++f) wv(static_cast<Eigen::Index>(f)) = w[f];

  CorrelationTensor out(grid);
  std::vector<cplx> harmonics(n * n * m);
  MatrixXc a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < n; ++i)
        a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = alpha[(s * n + i) * m + k];
    MatrixXc fk = two_pi * (a * wv.asDiagonal() * a.adjoint());
    // Exact Hermitian block.
    for (Eigen::Index s = 0; s < fk.rows(); ++s) {
      fk(s, s) = fk(s, s).real();
      for (Eigen::Index t = s + 1; t < fk.cols(); ++t) fk(t, s) = std::conj(fk(s, t));
    }
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        harmonics[(s * n + t) * m + k] = fk(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
  }
  batched_dft(harmonics.data(), out.values.data(), n * n, m, +1);
  out.scale = 1.0;
  out.normalize();
  return out;
}

/// K = T^2 / (2 pi sum w_s w_t dphi sum_j |G|^2) with T the trace; equals the
/// inverse purity for a unit-trace tensor and is independent of overall scale.
inline double schmidt_number_g1(const CorrelationTensor& g1) {
  const auto& grid = g1.grid;
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto w = grid.flat_weights();
  double acc = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) row += std::norm(g1.at(s, t, j));
      acc += w[s] * w[t] * row;
    }
  const double purity = two_pi * grid.dphi * acc;
  if (!(purity > 0.0)) throw NumericalError("Schmidt number: correlation tensor has zero norm");
  const double tr = g1.trace();
  return tr * tr / purity;
}

} // namespace stsm
