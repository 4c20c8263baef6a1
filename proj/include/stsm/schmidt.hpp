#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "stsm/biphoton.hpp"
#include "stsm/constants.hpp"
#include "stsm/errors.hpp"
#include "stsm/fft.hpp"
#include "stsm/grid.hpp"
#include "stsm/linalg.hpp"
#include "stsm/parallel.hpp"

namespace stsm {

/// Quadrature weights used to turn kernels into matrices. `flat` drops the
/// q dq factor of the polar measure; it exists only as a negative control.
enum class Measure { polar, flat };

inline std::vector<double> measure_weights(const GridSpec& grid, Measure measure) {
  if (measure == Measure::polar) return grid.flat_weights();
  return std::vector<double>(grid.flat_size(), grid.dq * grid.domega);
}

/// Weighted matrix of one azimuthal harmonic:
///   matrix(s, i) = 2 pi sqrt(w_s) alpha_l(s, i) sqrt(w_i),
/// where alpha_l = (1/M) sum_j Psi(.., phi_j) e^{-i l phi_j}. The 2 pi makes the
/// squared singular values the Schmidt weights directly.
struct AzimuthalKernel {
  int l = 0;
  MatrixXc matrix;
  std::vector<double> weights; ///< quadrature weight of each flat (q, omega) index
};

/// All M Fourier blocks alpha_k(s, i), k = 0..M-1, laid out [s][i][k].
inline std::vector<cplx> azimuthal_spectrum(const BiphotonTensor& psi) {
  const std::size_t n = psi.grid.flat_size();
  const std::size_t m = psi.grid.m();
  std::vector<cplx> alpha(n * n * m);
  batched_dft(psi.values.data(), alpha.data(), n * n, m, -1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (auto& a : alpha) a *= inv_m;
  return alpha;
}

inline std::vector<AzimuthalKernel> azimuthal_kernels(const BiphotonTensor& psi, int l_max,
                                                      Measure measure = Measure::polar) {
  const auto& grid = psi.grid;
  grid.require_resolves(l_max);
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  const auto alpha = azimuthal_spectrum(psi);
  const auto w = measure_weights(grid, measure);
  std::vector<double> sw(n);
  for (std::size_t s = 0; s < n; ++s) sw[s] = std::sqrt(w[s]);

  std::vector<AzimuthalKernel> out(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    auto& k = out[static_cast<std::size_t>(l)];
    k.l = l;
    k.weights = w;
    k.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < n; ++i)
        // sw[s] * sw[i] is commutative, so symmetric alpha gives an exactly symmetric matrix.
        k.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) =
            alpha[(s * n + i) * m + static_cast<std::size_t>(l)] * (two_pi * (sw[s] * sw[i]));
  }
  return out;
}

/// Singular values and unweighted modes of one kernel. Columns of `left` and
/// `right` are orthonormal under sum_f w_f conj(a_f) b_f, i.e. the integral
/// over q dq domega. Right modes are the conjugated right singular vectors so
/// that alpha_l = sum_m sigma_m left_m right_m^T / (2 pi).
struct KernelDecomposition {
  int l = 0;
  Eigen::VectorXd sigma;
  MatrixXc left;
  MatrixXc right;
};

namespace detail {

inline double first_moment(const GridSpec& grid, const std::vector<double>& w, const MatrixXc& modes,
                           Eigen::Index col, bool along_omega) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t f = 0; f < grid.flat_size(); ++f) {
    const double p = w[f] * std::norm(modes(static_cast<Eigen::Index>(f), col));
    num += p * (along_omega ? grid.omega[grid.omega_index(f)] : grid.q[grid.q_index(f)]);
    den += p;
  }
  return den > 0.0 ? num / den : 0.0;
}

} // namespace detail

/// True when the matrix equals its plain transpose within `rel` of its largest entry.
inline bool is_symmetric(const MatrixXc& a, double rel = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel * scale;
}

/// Keeps at most m_max singular triplets with sigma > tol * sigma_0.
///
/// Symmetric kernels (every exchange-symmetric state) are factorised as
/// A = Q Sigma Q^T; the right modes are then recomputed from the kernel as
/// A conj(u) / sigma, so their agreement with the left modes remains a real
/// check. Other kernels use a plain SVD. Each mode pair is rephased so that the
/// largest-magnitude sample of the left mode is real and positive (the product
/// left * right is unchanged).
inline KernelDecomposition decompose_kernel(const AzimuthalKernel& kernel, int m_max, double tol,
                                            const GridSpec& grid) {
  if (m_max < 1) throw ConfigError("m_max must be at least 1");
  if (!(tol >= 0.0)) throw ConfigError("singular value tolerance must be non-negative");
  if (!kernel.matrix.allFinite())
    throw NumericalError("kernel l = " + std::to_string(kernel.l) + " contains non-finite entries");
  const std::string context = "schmidt kernel l = " + std::to_string(kernel.l);

  Eigen::VectorXd sigma;
  MatrixXc left;  // weighted, unit columns
  MatrixXc right; // weighted, unit columns, A = left diag(sigma) right^T
  const bool symmetric = is_symmetric(kernel.matrix);
  if (symmetric) {
    auto t = takagi(kernel.matrix, context);
    sigma = std::move(t.sigma);
    left = std::move(t.q);
  } else {
    auto t = svd(kernel.matrix, true, context);
    sigma = std::move(t.sigma);
    left = std::move(t.u);
    right = t.v.conjugate();
  }

  Eigen::Index keep = 0;
  const double floor = sigma.size() > 0 ? tol * sigma(0) : 0.0;
  while (keep < sigma.size() && keep < m_max && sigma(keep) > floor) ++keep;
  if (symmetric) right = (kernel.matrix * left.leftCols(keep).conjugate()) * sigma.head(keep).cwiseInverse().asDiagonal();

  const std::size_t n = kernel.weights.size();
  KernelDecomposition out;
  out.l = kernel.l;
  out.sigma = sigma.head(keep);
  out.left.resize(static_cast<Eigen::Index>(n), keep);
  out.right.resize(static_cast<Eigen::Index>(n), keep);
  for (Eigen::Index c = 0; c < keep; ++c) {
    Eigen::Index peak = 0;
    left.col(c).cwiseAbs().maxCoeff(&peak);
    const cplx rot = std::polar(1.0, -std::arg(left(peak, c)));
    for (std::size_t f = 0; f < n; ++f) {
      const double inv = 1.0 / std::sqrt(kernel.weights[f]);
      const auto r = static_cast<Eigen::Index>(f);
      out.left(r, c) = left(r, c) * rot * inv;
      out.right(r, c) = right(r, c) * std::conj(rot) * inv;
    }
  }

  // Deterministic order: descending sigma, exact ties by first moment in omega then q.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(keep));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (out.sigma(a) != out.sigma(b)) return out.sigma(a) > out.sigma(b);
    const double wa = detail::first_moment(grid, kernel.weights, out.left, a, true);
    const double wb = detail::first_moment(grid, kernel.weights, out.left, b, true);
    if (wa != wb) return wa < wb;
    return detail::first_moment(grid, kernel.weights, out.left, a, false) <
           detail::first_moment(grid, kernel.weights, out.left, b, false);
  });
  KernelDecomposition sorted = out;
  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto dst = static_cast<Eigen::Index>(c);
    sorted.sigma(dst) = out.sigma(order[c]);
    sorted.left.col(dst) = out.left.col(order[c]);
    sorted.right.col(dst) = out.right.col(order[c]);
  }
  return sorted;
}

/// One retained Schmidt pair. `u` and `v` are normalised so that
/// u(q, omega) e^{i l phi} has unit norm under q dq dphi domega.
struct SchmidtMode {
  int l = 0;
  int m = 0;
  int degeneracy = 1;
  double lambda = 0.0;
  double beta = 0.0; ///< arg <u, v>
  std::vector<cplx> u;
  std::vector<cplx> v;
};

struct SchmidtResult {
  GridSpec grid;
  std::vector<SchmidtMode> modes; ///< ordered by l, then m
  double raw_total = 0.0;         ///< sum of degeneracy * lambda before renormalisation
  double K = 0.0;

  const SchmidtMode& mode(int l, int m) const {
    for (const auto& md : modes)
      if (md.l == l && md.m == m) return md;
    throw ConfigError("no Schmidt mode (l = " + std::to_string(l) + ", m = " + std::to_string(m) + ")");
  }

  double spectrum_sum() const {
    double s = 0.0;
    for (const auto& md : modes) s += md.degeneracy * md.lambda;
    return s;
  }

  /// Weights with the +-l degeneracy expanded, sorted descending.
  std::vector<double> expanded_spectrum() const {
    std::vector<double> out;
    for (const auto& md : modes)
      for (int d = 0; d < md.degeneracy; ++d) out.push_back(md.lambda);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  int max_l() const {
    int l = 0;
    for (const auto& md : modes) l = std::max(l, md.l);
    return l;
  }
};

inline double schmidt_number(const std::vector<SchmidtMode>& modes) {
  double s2 = 0.0;
  for (const auto& md : modes) s2 += md.degeneracy * md.lambda * md.lambda;
  if (!(s2 > 0.0)) throw NumericalError("Schmidt number undefined for an empty spectrum");
  return 1.0 / s2;
}

/// Polar inner product 2 pi sum_f w_f conj(a_f) b_f.
inline cplx polar_inner(const std::vector<double>& w, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx acc{};
  for (std::size_t f = 0; f < w.size(); ++f) acc += w[f] * std::conj(a[f]) * b[f];
  return two_pi * acc;
}

/// Combines per-l decompositions into a normalised spectrum (sum of degeneracy * lambda = 1).
/// Pairs with sigma <= tol * (largest sigma over all l) are dropped, so harmonics
/// that are pure rounding noise contribute nothing.
inline SchmidtResult assemble(const std::vector<KernelDecomposition>& parts, const GridSpec& grid,
                              double tol = 0.0) {
  SchmidtResult out;
  out.grid = grid;
  const auto w = grid.flat_weights();
  const double to_polar = 1.0 / std::sqrt(two_pi);
  double sigma_max = 0.0;
  for (const auto& part : parts)
    if (part.sigma.size() > 0) sigma_max = std::max(sigma_max, part.sigma(0));
  for (const auto& part : parts) {
    for (Eigen::Index c = 0; c < part.sigma.size() && part.sigma(c) > tol * sigma_max; ++c) {
      SchmidtMode md;
      md.l = part.l;
      md.m = static_cast<int>(c);
      md.degeneracy = part.l == 0 ? 1 : 2;
      md.lambda = part.sigma(c) * part.sigma(c);
      md.u.resize(grid.flat_size());
      md.v.resize(grid.flat_size());
      for (std::size_t f = 0; f < grid.flat_size(); ++f) {
        md.u[f] = part.left(static_cast<Eigen::Index>(f), c) * to_polar;
        md.v[f] = part.right(static_cast<Eigen::Index>(f), c) * to_polar;
      }
      md.beta = std::arg(polar_inner(w, md.u, md.v));
      out.modes.push_back(std::move(md));
    }
  }
  out.raw_total = out.spectrum_sum();
  if (out.modes.empty() || !(out.raw_total > 0.0))
    throw NumericalError("Schmidt assembly: empty spectrum");
  for (auto& md : out.modes) md.lambda /= out.raw_total;
  out.K = schmidt_number(out.modes);
  return out;
}

struct SchmidtOptions {
  int l_max = 100;
  int m_max = 100;
  double tol = 1e-8;
  std::size_t workers = 1;
  Measure measure = Measure::polar;
};

/// Full reduced pipeline: azimuthal FFT, per-l SVD (parallel over l), assembly.
inline SchmidtResult decompose(const BiphotonTensor& psi, const SchmidtOptions& opt) {
  const auto kernels = azimuthal_kernels(psi, opt.l_max, opt.measure);
  std::vector<KernelDecomposition> parts(kernels.size());
  parallel_for(kernels.size(), opt.workers,
               [&](std::size_t l) { parts[l] = decompose_kernel(kernels[l], opt.m_max, opt.tol, psi.grid); });
  return assemble(parts, psi.grid, opt.tol);
}

/// u_lm(q, omega) e^{i l phi} laid out [flat][phi].
inline std::vector<cplx> reconstruct_mode(const SchmidtResult& result, int l, int m,
                                          const std::vector<double>& phi) {
  const auto& md = result.mode(l, m);
  std::vector<cplx> out(md.u.size() * phi.size());
  for (std::size_t f = 0; f < md.u.size(); ++f)
    for (std::size_t j = 0; j < phi.size(); ++j) out[f * phi.size() + j] = md.u[f] * std::polar(1.0, l * phi[j]);
  return out;
}

/// I(q, omega) = sum of degeneracy * lambda |u|^2 over retained modes, by flat index.
inline std::vector<double> intensity_from_modes(const SchmidtResult& result) {
  std::vector<double> out(result.grid.flat_size(), 0.0);
  for (const auto& md : result.modes)
    for (std::size_t f = 0; f < out.size(); ++f) out[f] += md.degeneracy * md.lambda * std::norm(md.u[f]);
  return out;
}

/// Truncated Schmidt sum sum sqrt(lambda) u(s) v(i) e^{i l dphi} (both signs of l),
/// in the units of the normalised tensor.
inline BiphotonTensor reconstruct_state(const SchmidtResult& result) {
  BiphotonTensor out(result.grid);
  const auto& grid = result.grid;
  const std::size_t n = grid.flat_size();
  const std::size_t m = grid.m();
  for (const auto& md : result.modes) {
    const double amp = std::sqrt(md.lambda * result.raw_total);
    for (std::size_t j = 0; j < m; ++j) {
      // e^{il dphi} + e^{-il dphi} for l > 0
      const cplx phase = md.l == 0 ? cplx{1.0, 0.0} : cplx{2.0 * std::cos(md.l * grid.phi[j]), 0.0};
      for (std::size_t s = 0; s < n; ++s) {
        const cplx left = amp * md.u[s] * phase;
        for (std::size_t i = 0; i < n; ++i) out.at(s, i, j) += left * md.v[i];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant checks

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;

  void add(std::string name, double value, double tolerance) {
    checks.push_back({std::move(name), value, tolerance, value <= tolerance});
  }
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
  const InvariantCheck& get(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw ConfigError("unknown invariant '" + name + "'");
  }
};

/// Largest |Psi(dphi) - Psi(2 pi - dphi)| and |Psi(s, i) - Psi(i, s)|.
inline std::pair<double, double> symmetry_defects(const BiphotonTensor& psi) {
  const std::size_t n = psi.grid.flat_size();
  const std::size_t m = psi.grid.m();
  double even = 0.0;
  double exchange = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        even = std::max(even, std::abs(psi.at(s, i, j) - psi.at(s, i, (m - j) % m)));
        exchange = std::max(exchange, std::abs(psi.at(s, i, j) - psi.at(i, s, j)));
      }
  return {even, exchange};
}

/// Largest |Gram - I| entry over every l.
inline double gram_deviation(const SchmidtResult& result) {
  const auto w = result.grid.flat_weights();
  double worst = 0.0;
  for (const auto& a : result.modes)
    for (const auto& b : result.modes) {
      if (a.l != b.l) continue;
      const cplx g = polar_inner(w, a.u, b.u);
      worst = std::max(worst, std::abs(g - (a.m == b.m ? cplx{1.0, 0.0} : cplx{})));
    }
  return worst;
}

/// Largest pointwise |v - e^{i beta} u| over all modes, sampled as unit vectors
/// (each sample scaled by sqrt(2 pi w)).
inline double phase_alignment_residual(const SchmidtResult& result) {
  const auto w = result.grid.flat_weights();
  double worst = 0.0;
  for (const auto& md : result.modes) {
    const cplx rot = std::polar(1.0, md.beta);
    for (std::size_t f = 0; f < w.size(); ++f)
      worst = std::max(worst, std::sqrt(two_pi * w[f]) * std::abs(md.v[f] - rot * md.u[f]));
  }
  return worst;
}

/// |sum_l (2 - delta_l0) ||A_l||_F^2 - ||Psi||^2| relative to ||Psi||^2.
inline double parseval_defect(const BiphotonTensor& psi, const std::vector<AzimuthalKernel>& kernels) {
  double total = 0.0;
  for (const auto& k : kernels) total += (k.l == 0 ? 1.0 : 2.0) * k.matrix.squaredNorm();
  const double norm = psi.squared_norm();
  return std::abs(total - norm) / norm;
}

/// Ordering defects: negative weights and increases of lambda with m inside one l.
inline double ordering_defect(const SchmidtResult& result) {
  double worst = 0.0;
  for (std::size_t k = 0; k < result.modes.size(); ++k) {
    const auto& md = result.modes[k];
    worst = std::max(worst, -md.lambda);
    if (k > 0 && result.modes[k - 1].l == md.l) worst = std::max(worst, md.lambda - result.modes[k - 1].lambda);
  }
  return worst;
}

inline InvariantReport check_invariants(const BiphotonTensor& psi, const SchmidtResult& result, int l_max) {
  InvariantReport rep;
  const auto [even, exchange] = symmetry_defects(psi);
  rep.add("psi_even_in_dphi", even, 0.0);
  rep.add("psi_exchange_symmetric", exchange, 0.0);
  rep.add("spectrum_normalisation", std::abs(result.spectrum_sum() - 1.0), 1e-10);
  rep.add("spectrum_ordering", ordering_defect(result), 0.0);
  rep.add("gram_deviation", gram_deviation(result), 1e-8);
  rep.add("phase_alignment", phase_alignment_residual(result), 1e-8);
  rep.add("parseval", parseval_defect(psi, azimuthal_kernels(psi, l_max)), 1e-10);
  rep.add("k_definition", std::abs(result.K * [&] {
            double s2 = 0.0;
            for (const auto& md : result.modes) s2 += md.degeneracy * md.lambda * md.lambda;
            return s2;
          }() - 1.0), 1e-10);
  return rep;
}

} // namespace stsm
