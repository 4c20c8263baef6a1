#pragma once

#include <cstddef>
#include <vector>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"

namespace stsm {

/// Discretisation of one photon's radial wavevector and frequency axes plus the
/// relative azimuth between the two photons.
///
/// All axes use the midpoint rule on uniform cells: q_j = (j + 1/2) dq, so no
/// sample sits on q = 0, and omega is centred on `omega_center`. The relative
/// angle samples are phi_j = 2 pi j / M on [0, 2 pi).
///
/// A (q, omega) pair is flattened row-major: flat = iq * nw + iw.
struct GridSpec {
  std::vector<double> q;
  std::vector<double> omega;
  std::vector<double> phi;
  double dq = 0.0;
  double domega = 0.0;
  double dphi = 0.0;
  double omega_center = 0.0;

  static GridSpec make(std::size_t nq, double q_max, std::size_t nw, double omega_center,
                       double omega_half_width, std::size_t m) {
    if (nq == 0 || nw == 0 || m == 0) throw ConfigError("grid: every axis needs at least one sample");
    if (!(q_max > 0.0)) throw ConfigError("grid: q_max must be positive");
    if (!(omega_half_width > 0.0)) throw ConfigError("grid: omega half width must be positive");
    if (!(omega_center > omega_half_width))
      throw ConfigError("grid: frequency window reaches non-positive frequencies");
    GridSpec g;
    g.dq = q_max / static_cast<double>(nq);
    g.domega = 2.0 * omega_half_width / static_cast<double>(nw);
    g.dphi = two_pi / static_cast<double>(m);
    g.omega_center = omega_center;
    g.q.resize(nq);
    g.omega.resize(nw);
    g.phi.resize(m);
    for (std::size_t j = 0; j < nq; ++j) g.q[j] = (static_cast<double>(j) + 0.5) * g.dq;
    // Mirror pairs (iw, nw-1-iw) sit symmetrically about the centre.
    for (std::size_t j = 0; j < nw; ++j)
      g.omega[j] = omega_center + (static_cast<double>(j) + 0.5 - 0.5 * static_cast<double>(nw)) * g.domega;
    for (std::size_t j = 0; j < m; ++j) g.phi[j] = static_cast<double>(j) * g.dphi;
    return g;
  }

  std::size_t nq() const { return q.size(); }
  std::size_t nw() const { return omega.size(); }
  std::size_t m() const { return phi.size(); }
  std::size_t flat_size() const { return q.size() * omega.size(); }
  std::size_t flat(std::size_t iq, std::size_t iw) const { return iq * omega.size() + iw; }
  std::size_t q_index(std::size_t flat_index) const { return flat_index / omega.size(); }
  std::size_t omega_index(std::size_t flat_index) const { return flat_index % omega.size(); }

  /// Polar radial-spectral weight q dq domega of one (q, omega) cell.
  double weight(std::size_t iq, std::size_t /*iw*/) const { return q[iq] * dq * domega; }

  /// Weights of every flattened (q, omega) cell.
  std::vector<double> flat_weights() const {
    std::vector<double> w(flat_size());
    for (std::size_t iq = 0; iq < nq(); ++iq)
      for (std::size_t iw = 0; iw < nw(); ++iw) w[flat(iq, iw)] = weight(iq, iw);
    return w;
  }

  /// Largest azimuthal index the phi sampling resolves without aliasing onto -l.
  int max_resolved_l() const { return static_cast<int>((m() - 1) / 2); }

  void require_resolves(int l_max) const {
    if (l_max < 0) throw ConfigError("l_max must be non-negative");
    if (m() < 2 * static_cast<std::size_t>(l_max) + 1)
      throw ConfigError("grid: M = " + std::to_string(m()) + " azimuthal samples cannot resolve l_max = " +
                        std::to_string(l_max) + " (need M >= 2 l_max + 1)");
  }
};

} // namespace stsm
