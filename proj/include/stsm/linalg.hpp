#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"

namespace stsm {

using MatrixXc = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXc = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct SvdResult {
  Eigen::VectorXd sigma; ///< descending
  MatrixXc u;            ///< left singular vectors (columns); empty when values only
  MatrixXc v;            ///< right singular vectors, A = U diag(sigma) V^H
};

/// Thin SVD through LAPACK's divide-and-conquer driver.
inline SvdResult svd(MatrixXc a, bool vectors, const std::string& context) {
  const lapack_int rows = static_cast<lapack_int>(a.rows());
  const lapack_int cols = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(rows, cols);
  SvdResult out;
  out.sigma.resize(k);
  if (k == 0) return out;
  MatrixXc u;
  MatrixXc vt;
  if (vectors) {
    u.resize(rows, k);
    vt.resize(k, cols);
  }
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, vectors ? 'S' : 'N', rows, cols, a.data(), rows, out.sigma.data(),
                     vectors ? u.data() : nullptr, rows, vectors ? vt.data() : nullptr, vectors ? k : 1);
  if (info != 0)
    throw NumericalError(context + ": zgesdd failed (info = " + std::to_string(info) + ")");
  if (vectors) {
    out.u = std::move(u);
    out.v = vt.adjoint();
  }
  return out;
}

struct EigResult {
  Eigen::VectorXd values; ///< descending
  MatrixXc vectors;
};

/// Eigen-decomposition of a Hermitian matrix (lower triangle referenced).
inline EigResult hermitian_eig(MatrixXc a, const std::string& context) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigResult out;
  Eigen::VectorXd w(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0)
    throw NumericalError(context + ": zheevd failed (info = " + std::to_string(info) + ")");
  // LAPACK returns ascending order.
  out.values = w.reverse();
  out.vectors = a.rowwise().reverse();
  return out;
}

/// Takagi factorisation A = Q diag(sigma) Q^T of a complex symmetric matrix.
///
/// Solved as the real symmetric eigenproblem of [[Re A, Im A], [Im A, -Re A]],
/// whose spectrum is {+sigma, -sigma}: an eigenvector [x; y] of +sigma gives the
/// Takagi vector q = x + i y with A conj(q) = sigma q. Each vector is backward
/// stable on its own, so nearly equal singular values do not mix the left and
/// right factors the way independently computed SVD factors can.
struct TakagiResult {
  Eigen::VectorXd sigma; ///< descending, non-negative
  MatrixXc q;            ///< columns are the Takagi vectors
};

inline TakagiResult takagi(const MatrixXc& a, const std::string& context) {
  const Eigen::Index n = a.rows();
  TakagiResult out;
  if (n == 0) return out;
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a.real();
  m.topRightCorner(n, n) = a.imag();
  m.bottomLeftCorner(n, n) = a.imag();
  m.bottomRightCorner(n, n) = -a.real();
  // Eigen's own solver: OpenBLAS' real double eigen drivers are unreliable on some
  // AVX-512 kernels, while the complex drivers used elsewhere are not affected.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError(context + ": symmetric eigensolver did not converge");
  const Eigen::VectorXd& w = es.eigenvalues();
  const Eigen::MatrixXd& vec = es.eigenvectors();
  // Ascending order: the upper half holds the n non-negative eigenvalues.
  out.sigma.resize(n);
  out.q.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = 2 * n - 1 - k;
    out.sigma(k) = std::max(0.0, w(src));
    for (Eigen::Index r = 0; r < n; ++r) out.q(r, k) = cplx{vec(r, src), vec(n + r, src)};
  }
  return out;
}

} // namespace stsm
