#pragma once

#include <cmath>
#include <vector>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"
#include "stsm/grid.hpp"
#include "stsm/linalg.hpp"

namespace stsm {

enum class Axis { q, omega };

/// Second-moment width of |u|^2 along one axis under the polar measure.
inline double mode_width(const std::vector<cplx>& u, const GridSpec& grid, Axis axis) {
  if (u.size() != grid.flat_size()) throw ConfigError("mode_width: mode does not match the grid");
  const auto w = grid.flat_weights();
  auto coord = [&](std::size_t f) { return axis == Axis::q ? grid.q[grid.q_index(f)] : grid.omega[grid.omega_index(f)]; };
  double norm = 0.0;
  double mean = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double p = w[f] * std::norm(u[f]);
    norm += p;
    mean += p * coord(f);
  }
  if (!(norm > 0.0)) throw DomainError("mode_width: zero mode");
  mean /= norm;
  double var = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double d = coord(f) - mean;
    var += w[f] * std::norm(u[f]) * d * d;
  }
  return std::sqrt(var / norm);
}

/// Space-time non-separability C = (sum sigma)^2 / sum sigma^2 of one mode,
/// where sigma are the squared singular values of u(q, omega) sqrt(q dq) sqrt(domega).
/// C = 1 for a product s(q) t(omega).
inline double nonseparability(const std::vector<cplx>& u, const GridSpec& grid) {
  if (u.size() != grid.flat_size()) throw ConfigError("nonseparability: mode does not match the grid");
  MatrixXc a(static_cast<Eigen::Index>(grid.nq()), static_cast<Eigen::Index>(grid.nw()));
  const double sw = std::sqrt(grid.domega);
  for (std::size_t iq = 0; iq < grid.nq(); ++iq) {
    const double sq = std::sqrt(grid.q[iq] * grid.dq);
    for (std::size_t iw = 0; iw < grid.nw(); ++iw)
      a(static_cast<Eigen::Index>(iq), static_cast<Eigen::Index>(iw)) = u[grid.flat(iq, iw)] * (sq * sw);
  }
  const auto s = svd(std::move(a), false, "nonseparability").sigma;
  double sum = 0.0;
  double sum2 = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double sigma = s(k) * s(k);
    sum += sigma;
    sum2 += sigma * sigma;
  }
  if (!(sum2 > 0.0)) throw DomainError("nonseparability: zero mode");
  return sum * sum / sum2;
}

} // namespace stsm
