#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <gsl/gsl_integration.h>

#include "stsm/mode_metrics.hpp"
#include "stsm/biphoton.hpp"
#include "stsm/constants.hpp"
#include "stsm/correlation.hpp"
#include "stsm/dispersion.hpp"
#include "stsm/errors.hpp"
#include "stsm/grid.hpp"
#include "stsm/linalg.hpp"
#include "stsm/parallel.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

/// Coherent Gaussian pump of the high-gain model,
///   V_p(rho, t) = g exp(-rho^2 / w_p^2) exp(-t^2 / (2 dt^2)).
/// Its Fourier transform has the low-gain shape with delta omega_p = sqrt(2) / dt.
struct PumpHighGain {
  double g = 0.0;
  double waist = 0.0;
  double delta_t = 0.0;
  double lambda_p0 = 0.0;

  double omega_p0() const { return angular_frequency(lambda_p0); }

  void validate() const {
    if (!(g > 0.0 && waist > 0.0 && delta_t > 0.0 && lambda_p0 > 0.0))
      throw ConfigError("high-gain pump: g, waist, delta_t and lambda_p0 must be positive");
  }

  double envelope_sq(double rho, double t) const {
    return g * g * std::exp(-2.0 * rho * rho / (waist * waist)) * std::exp(-t * t / (delta_t * delta_t));
  }
};

/// Low-gain pump with the same spatial and spectral shape.
inline PumpLowGain matched_low_gain_pump(const PumpHighGain& p) {
  const double omega0 = p.omega_p0();
  const double delta_omega = std::sqrt(2.0) / p.delta_t;
  return PumpLowGain{p.lambda_p0, p.waist, delta_omega * p.lambda_p0 / omega0};
}

/// C2_eff inside Gamma. With c2_eff = k0^2 / L^2, k0 the ordinary wavenumber at
/// omega_p0 / 2, Gamma L equals g at the collinear degenerate point with perfect
/// phase matching.
struct GainCalibration {
  double c2_eff = 0.0;

  static GainCalibration calibrate(const CrystalConfig& crystal, double lambda_p0) {
    crystal.validate();
    const double k0 = ordinary_wavenumber(0.5 * angular_frequency(lambda_p0), crystal.sellmeier);
    return GainCalibration{k0 * k0 / (crystal.length * crystal.length)};
  }

  void validate() const {
    if (!(c2_eff > 0.0)) throw ConfigError("gain calibration: C2_eff must be positive");
  }
};

/// Gamma^2 = C2 / (k_sz kbar_iz) |V_p|^2 - (dkbar / 2)^2.
inline double gain_bracket(double central_dkz, double envelope_sq, double kz_product, const GainCalibration& cal) {
  return cal.c2_eff / kz_product * envelope_sq - 0.25 * central_dkz * central_dkz;
}

/// Principal square root of the bracket; positive imaginary when the bracket is negative.
inline cplx gamma(double central_dkz, double rho, double t, const PumpHighGain& pump, const GainCalibration& cal,
                  double kz_product) {
  return std::sqrt(cplx{gain_bracket(central_dkz, pump.envelope_sq(rho, t), kz_product, cal), 0.0});
}

/// sinh(Gamma L) / Gamma from a series; accurate for |Gamma L| small.
inline double gain_kernel_series(double bracket, double length) {
  const double x2 = bracket * length * length; // (Gamma L)^2, signed
  return length * (1.0 + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0);
}

/// sinh(Gamma L) / Gamma, real for either sign of the bracket; L at Gamma = 0.
inline double gain_kernel(double bracket, double length) {
  const double x = std::sqrt(std::abs(bracket)) * length;
  if (x < 1e-4) return gain_kernel_series(bracket, length);
  return bracket >= 0.0 ? length * std::sinh(x) / x : length * std::sin(x) / x;
}

/// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> x;
  std::vector<double> w;

  static Quadrature gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw ConfigError("quadrature order must be positive");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    if (!table) throw NumericalError("could not allocate Gauss-Legendre table");
    Quadrature q;
    q.x.resize(n);
    q.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &q.x[i], &q.w[i], table.get());
    return q;
  }
};

struct HighGainOptions {
  std::size_t rho_nodes = 64;
  std::size_t t_nodes = 64;
  double span = 4.0;      ///< integrate rho over [0, span w_p] and t over [-span dt, span dt]
  double tail_tol = 1e-6; ///< largest accepted Gaussian tail mass outside the box
  std::size_t workers = 1;
};

/// Mass of the pump intensity envelope outside the integration box.
inline double envelope_tail(double span) { return std::erfc(span) + std::exp(-2.0 * span * span); }

/// G(q, omega, q', omega', dphi) =
///   e^{i (dkbar - dkbar') L / 2} / (k_sz k_sz')
///   * int rho drho dt 2 pi J0(|dq| rho) |V_p|^2 cos((omega - omega') t) H(rho, t) H'(rho, t),
/// H = sinh(Gamma L) / Gamma. Built for s <= s' and dphi <= pi, then mirrored,
/// so Hermitian symmetry is exact. Returned normalised; `scale` is the raw trace.
inline CorrelationTensor build_g1(const GridSpec& grid, const PumpHighGain& pump, const CrystalConfig& crystal,
                                  const GainCalibration& cal, const HighGainOptions& opt = {}) {
  pump.validate();
  crystal.validate();
  cal.validate();
  if (!(opt.span > 0.0)) throw ConfigError("high-gain quadrature span must be positive");
  const double tail = envelope_tail(opt.span);
  if (tail > opt.tail_tol)
    throw NumericalError("high-gain quadrature: estimated tail " + std::to_string(tail) +
                         " exceeds tolerance " + std::to_string(opt.tail_tol) + "; increase span");

  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const std::size_t nq = grid.nq();
  const std::size_t nw = grid.nw();
  const double length = crystal.length;
  const double omega_p0 = pump.omega_p0();

  const auto rq = Quadrature::gauss_legendre(opt.rho_nodes, 0.0, opt.span * pump.waist);
  const auto tq = Quadrature::gauss_legendre(opt.t_nodes, -opt.span * pump.delta_t, opt.span * pump.delta_t);
  const std::size_t nr = rq.x.size();
  const std::size_t nt = tq.x.size();

  std::vector<double> env(nr * nt);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t t = 0; t < nt; ++t) env[r * nt + t] = pump.envelope_sq(rq.x[r], tq.x[t]);

  // Per signal point: k_sz, central mismatch and the gain kernel on the (rho, t) nodes.
  std::vector<double> ksz(n), dkbar(n);
  std::vector<double> h(n * nr * nt);
  parallel_for(n, opt.workers, [&](std::size_t s) {
    const double q = grid.q[grid.q_index(s)];
    const double w = grid.omega[grid.omega_index(s)];
    const double ks = ordinary_wavenumber(w, crystal.sellmeier);
    const double ki = ordinary_wavenumber(omega_p0 - w, crystal.sellmeier);
    ksz[s] = detail::longitudinal(ks, q, "signal", w);
    const double kiz = detail::longitudinal(ki, q, "idler", omega_p0 - w);
    dkbar[s] = central_delta_kz(q, w, crystal, pump.lambda_p0);
    const double kz_product = ksz[s] * kiz;
    for (std::size_t k = 0; k < nr * nt; ++k)
      h[s * nr * nt + k] = gain_kernel(gain_bracket(dkbar[s], env[k], kz_product, cal), length);
  });

  // cos((omega - omega') t) depends on |iw - iw'| only.
  std::vector<double> cos_table(nw * nt);
  for (std::size_t d = 0; d < nw; ++d)
    for (std::size_t t = 0; t < nt; ++t)
      cos_table[d * nt + t] = std::cos(static_cast<double>(d) * grid.domega * tq.x[t]);

  // 2 pi rho w_rho J0(|dq| rho) for every (iq <= iq', dphi <= pi, rho).
  const std::size_t half = m / 2;
  std::vector<double> bessel(nq * nq * (half + 1) * nr);
  auto bessel_at = [&](std::size_t a, std::size_t b, std::size_t j) {
    return &bessel[((a * nq + b) * (half + 1) + j) * nr];
  };
  parallel_for(nq, opt.workers, [&](std::size_t a) {
    for (std::size_t b = a; b < nq; ++b)
      for (std::size_t j = 0; j <= half; ++j) {
        const double qa = grid.q[a];
        const double qb = grid.q[b];
        const double dq2 = qa * qa + qb * qb - 2.0 * (qa * qb) * std::cos(grid.phi[j]);
        const double dq = std::sqrt(std::max(0.0, dq2));
        double* out = bessel_at(a, b, j);
        for (std::size_t r = 0; r < nr; ++r)
          out[r] = two_pi * rq.w[r] * rq.x[r] * std::cyl_bessel_j(0.0, dq * rq.x[r]);
        std::copy(out, out + nr, bessel_at(b, a, j));
      }
  });

  CorrelationTensor out(grid);
  parallel_for(n, opt.workers, [&](std::size_t s) {
    std::vector<double> trow(nr);
    const std::size_t iqs = grid.q_index(s);
    const std::size_t iws = grid.omega_index(s);
    for (std::size_t u = s; u < n; ++u) {
      const std::size_t iqu = grid.q_index(u);
      const std::size_t iwu = grid.omega_index(u);
      const std::size_t d = iws > iwu ? iws - iwu : iwu - iws;
      const double* hs = &h[s * nr * nt];
      const double* hu = &h[u * nr * nt];
      const double* ct = &cos_table[d * nt];
      for (std::size_t r = 0; r < nr; ++r) {
        double acc = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t k = r * nt + t;
          acc += tq.w[t] * env[k] * ct[t] * (hs[k] * hu[k]);
        }
        trow[r] = acc;
      }
      const cplx pref = std::polar(1.0 / (ksz[s] * ksz[u]), 0.5 * (dkbar[s] - dkbar[u]) * length);
      for (std::size_t j = 0; j <= half; ++j) {
        const double* bj = bessel_at(iqs, iqu, j);
        double acc = 0.0;
        for (std::size_t r = 0; r < nr; ++r) acc += bj[r] * trow[r];
        const cplx val = s == u ? cplx{acc / (ksz[s] * ksz[s]), 0.0} : pref * acc;
        const std::size_t jm = (m - j) % m;
        out.at(s, u, j) = val;
        out.at(s, u, jm) = val;
        out.at(u, s, j) = std::conj(val);
        out.at(u, s, jm) = std::conj(val);
      }
    }
  });
  out.scale = 1.0;
  out.normalize();
  return out;
}

/// Absolute signal intensity: the measure-weighted trace times the stored scale.
inline double integrated_intensity(const CorrelationTensor& g1) { return g1.scale * g1.trace(); }

/// Largest deviation of any flattened, weighted harmonic f_l (l <= l_max) from Hermitian.
inline double harmonic_hermitian_defect(const CorrelationTensor& g1, int l_max) {
  const auto f = correlation_harmonics(g1);
  const std::size_t n = g1.grid.flat_size();
  const std::size_t m = g1.grid.m();
  double worst = 0.0;
  for (int l = 0; l <= l_max; ++l)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) {
        const auto k = static_cast<std::size_t>(l);
        worst = std::max(worst, std::abs(f[(s * n + t) * m + k] - std::conj(f[(t * n + s) * m + k])));
      }
  return worst;
}

/// Coherent-mode decomposition: per-l eigen-decomposition of the weighted
/// harmonic F_l = 2 pi W^1/2 f_l W^1/2. Eigenvalues are the weights lambda_lm,
/// right modes equal left modes. Weights below tol^2 lambda_max are dropped.
inline SchmidtResult coherent_modes(const CorrelationTensor& g1, int l_max, int m_max, double tol = 1e-8,
                                    std::size_t workers = 1) {
  const auto& grid = g1.grid;
  grid.require_resolves(l_max);
  if (m_max < 1) throw ConfigError("m_max must be at least 1");
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto f = correlation_harmonics(g1);
  const auto w = grid.flat_weights();
  std::vector<double> sw(n);
  for (std::size_t s = 0; s < n; ++s) sw[s] = std::sqrt(w[s]);

  std::vector<EigResult> eig(static_cast<std::size_t>(l_max) + 1);
  parallel_for(eig.size(), workers, [&](std::size_t l) {
    MatrixXc a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
            f[(s * n + t) * m + l] * (two_pi * (sw[s] * sw[t]));
    eig[l] = hermitian_eig(std::move(a), "coherent modes l = " + std::to_string(l));
  });

  double lmax = 0.0;
  for (const auto& e : eig)
    if (e.values.size() > 0) lmax = std::max(lmax, e.values(0));
  if (!(lmax > 0.0)) throw NumericalError("coherent modes: correlation tensor has no positive weight");
  for (std::size_t l = 0; l < eig.size(); ++l) {
    const double low = eig[l].values.minCoeff();
    if (low < -1e-8 * lmax)
      throw NumericalError("coherent modes: eigenvalue " + std::to_string(low) + " at l = " + std::to_string(l) +
                           " is significantly negative; the correlation quadrature is inaccurate");
  }

  SchmidtResult out;
  out.grid = grid;
  const double floor = tol * tol * lmax;
  const double to_polar = 1.0 / std::sqrt(two_pi);
  for (std::size_t l = 0; l < eig.size(); ++l) {
    const auto& e = eig[l];
    for (Eigen::Index c = 0; c < e.values.size() && c < m_max && e.values(c) > floor; ++c) {
      SchmidtMode md;
      md.l = static_cast<int>(l);
      md.m = static_cast<int>(c);
      md.degeneracy = l == 0 ? 1 : 2;
      md.lambda = e.values(c);
      Eigen::Index peak = 0;
      e.vectors.col(c).cwiseAbs().maxCoeff(&peak);
      const cplx rot = std::polar(1.0, -std::arg(e.vectors(peak, c)));
      md.u.resize(n);
      for (std::size_t s = 0; s < n; ++s)
        md.u[s] = e.vectors(static_cast<Eigen::Index>(s), c) * rot * (to_polar / sw[s]);
      md.v = md.u;
      out.modes.push_back(std::move(md));
    }
  }
  out.raw_total = out.spectrum_sum();
  for (auto& md : out.modes) md.lambda /= out.raw_total;
  out.K = schmidt_number(out.modes);
  return out;
}

struct GainSweepRow {
  double g = 0.0;
  double intensity = 0.0;
  double K = 0.0;     ///< coherent-mode spectrum
  double K_g1 = 0.0;  ///< direct purity integral
  double width_q = 0.0;
  double width_omega = 0.0;
};

/// One high-gain decomposition per g; widths are those of |u_00|.
inline std::vector<GainSweepRow> gain_sweep(const GridSpec& grid, PumpHighGain pump, const CrystalConfig& crystal,
                                            const std::vector<double>& gains, int l_max, int m_max, double tol,
                                            const HighGainOptions& opt = {}) {
  const auto cal = GainCalibration::calibrate(crystal, pump.lambda_p0);
  std::vector<GainSweepRow> rows;
  for (double g : gains) {
    pump.g = g;
    const auto g1 = build_g1(grid, pump, crystal, cal, opt);
    const auto res = coherent_modes(g1, l_max, m_max, tol, opt.workers);
    const auto& u00 = res.mode(0, 0).u;
    rows.push_back({g, integrated_intensity(g1), res.K, schmidt_number_g1(g1), mode_width(u00, grid, Axis::q),
                    mode_width(u00, grid, Axis::omega)});
  }
  return rows;
}

} // namespace stsm
