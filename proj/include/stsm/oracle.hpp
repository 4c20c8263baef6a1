#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stsm/biphoton.hpp"
#include "stsm/constants.hpp"
#include "stsm/errors.hpp"
#include "stsm/linalg.hpp"
#include "stsm/schmidt.hpp"

// Brute-force references. Nothing here uses the azimuthal reduction: the
// explicit phi_s and phi_i axes are sampled and the full bipartite matrix is
// decomposed densely. Single threaded on purpose.

namespace stsm::oracle {

inline constexpr std::size_t max_axis = 16;

inline void guard(const GridSpec& grid) {
  const std::size_t largest = std::max({grid.nq(), grid.nw(), grid.m()});
  if (largest > max_axis)
    throw ConfigError("oracle size guard: " + std::to_string(largest) + " samples on one axis exceed the limit of " +
                      std::to_string(max_axis) + " (the dense matrix would not fit a desk-scale run)");
}

/// Psi on the explicit grid: Psi(q_s, omega_s, phi_a; q_i, omega_i, phi_b) = tensor(s, i, (a - b) mod M).
/// Returns the weighted bipartite matrix with rows (s, a) and columns (i, b).
inline MatrixXc bipartite_matrix(const BiphotonTensor& psi, Measure measure = Measure::polar) {
  const auto& grid = psi.grid;
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto w = measure_weights(grid, measure);
  const auto dim = static_cast<Eigen::Index>(n * m);
  MatrixXc b(dim, dim);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < m; ++c) {
          const double weight = std::sqrt(w[s] * grid.dphi) * std::sqrt(w[i] * grid.dphi);
          b(static_cast<Eigen::Index>(s * m + a), static_cast<Eigen::Index>(i * m + c)) =
              weight * psi.at(s, i, (a + m - c) % m);
        }
  return b;
}

/// Squared singular values of the explicit six-variable state, normalised to sum to one, descending.
inline std::vector<double> brute_force_spectrum(const BiphotonTensor& psi, Measure measure = Measure::polar) {
  guard(psi.grid);
  const auto res = svd(bipartite_matrix(psi, measure), false, "oracle dense SVD");
  std::vector<double> lam(static_cast<std::size_t>(res.sigma.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < lam.size(); ++k) {
    lam[k] = res.sigma(static_cast<Eigen::Index>(k)) * res.sigma(static_cast<Eigen::Index>(k));
    total += lam[k];
  }
  if (!(total > 0.0)) throw NumericalError("oracle: zero state");
  for (auto& v : lam) v /= total;
  return lam;
}

/// Inverse purity of the signal reduced state by direct summation over the
/// explicit angles: rho(s a, t c) = sum_{i, b} W_i Psi(s, i, a - b) conj Psi(t, i, c - b).
/// Only the difference a - c matters, so one row of angles suffices.
inline double brute_force_K(const BiphotonTensor& psi) {
  const auto& grid = psi.grid;
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto w = grid.flat_weights();
  double trace = 0.0;
  double purity = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t d = 0; d < m; ++d) {
        // rho(s, a = d, t, c = 0)
        cplx rho{};
        for (std::size_t i = 0; i < n; ++i) {
          cplx acc{};
          for (std::size_t b = 0; b < m; ++b)
            acc += psi.at(s, i, (d + m - b) % m) * std::conj(psi.at(t, i, (m - b) % m));
          rho += w[i] * grid.dphi * acc;
        }
        // Every (a, c) pair with a - c = d contributes equally: m copies.
        purity += static_cast<double>(m) * w[s] * grid.dphi * w[t] * grid.dphi * std::norm(rho);
        if (s == t && d == 0) trace += static_cast<double>(m) * w[s] * grid.dphi * rho.real();
      }
  if (!(purity > 0.0)) throw NumericalError("oracle: zero state");
  return trace * trace / purity;
}

struct GaussianOracle {
  double ratio = 0.0;            ///< lambda_1 / lambda_0
  double ratio_spread = 0.0;     ///< largest |lambda_{n+1} / lambda_n - ratio| over the checked levels
  double closed_form = 0.0;      ///< ((sqrt a - sqrt b) / (sqrt a + sqrt b))^2
  std::vector<double> spectrum;  ///< leading normalised weights
};

/// Dense SVD of K(x, y) = exp(-a (x + y)^2 - b (x - y)^2) sampled on a
/// midpoint grid wide enough for the first `levels` Hermite-Gauss modes.
inline GaussianOracle gaussian_1d_oracle(double a, double b, int levels = 10, std::size_t samples = 400) {
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("gaussian oracle: a and b must be positive");
  const double narrow = std::min(a, b);
  const double half = 12.0 / std::sqrt(narrow);
  const double dx = 2.0 * half / static_cast<double>(samples);
  const auto n = static_cast<Eigen::Index>(samples);
  MatrixXc k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = -half + (static_cast<double>(i) + 0.5) * dx;
      const double y = -half + (static_cast<double>(j) + 0.5) * dx;
      k(i, j) = dx * std::exp(-a * (x + y) * (x + y) - b * (x - y) * (x - y));
    }
  const auto sv = svd(std::move(k), false, "gaussian oracle").sigma;
  GaussianOracle out;
  double total = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) total += sv(i) * sv(i);
  for (int i = 0; i <= levels && i < sv.size(); ++i) out.spectrum.push_back(sv(i) * sv(i) / total);
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  out.closed_form = std::pow((sa - sb) / (sa + sb), 2);
  if (out.spectrum.size() >= 2) {
    out.ratio = out.spectrum[1] / out.spectrum[0];
    for (std::size_t i = 2; i < out.spectrum.size(); ++i)
      out.ratio_spread = std::max(out.ratio_spread, std::abs(out.spectrum[i] / out.spectrum[i - 1] - out.ratio));
  }
  return out;
}

struct SpectrumComparison {
  std::size_t compared = 0;
  double max_relative_deviation = 0.0;
};

/// Relative deviation of the leading `top` weights of two descending spectra.
inline SpectrumComparison compare_spectra(const std::vector<double>& reference, const std::vector<double>& candidate,
                                          std::size_t top) {
  SpectrumComparison out;
  out.compared = std::min({top, reference.size(), candidate.size()});
  if (out.compared < top) out.max_relative_deviation = 1.0; // missing levels count as a full mismatch
  for (std::size_t k = 0; k < out.compared; ++k)
    out.max_relative_deviation =
        std::max(out.max_relative_deviation, std::abs(candidate[k] - reference[k]) / reference[k]);
  return out;
}

} // namespace stsm::oracle
