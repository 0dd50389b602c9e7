#pragma once

// Cyclic complex Jacobi eigensolver, templated on the real scalar so the
// finite-difference harness can run it in extended precision.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace hlevy::detail {

template <class Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
struct JacobiResult {
  RVector<Real> values;   // unsorted diagonal after convergence
  CMatrix<Real> vectors;  // columns are eigenvectors
  int sweeps = 0;
  Real off_norm = 0;
  bool converged = false;
};

template <class Real>
Real off_diagonal_norm(const CMatrix<Real>& a) {
  Real s = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

/// Diagonalizes a Hermitian matrix by cyclic sweeps over (p, q), p < q, in
/// row order. Stops once the off-diagonal Frobenius norm is at most
/// threshold · ‖A‖_F.
template <class Real>
JacobiResult<Real> jacobi_eigen(CMatrix<Real> a, Real threshold, int max_sweeps) {
  using C = std::complex<Real>;
  const Eigen::Index n = a.rows();
  JacobiResult<Real> out;
  out.vectors = CMatrix<Real>::Identity(n, n);

  Real scale = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) scale += std::norm(a(i, j));
  scale = std::sqrt(scale);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = C(a(i, i).real(), 0);

  const Real target = threshold * scale;
  out.off_norm = off_diagonal_norm(a);
  while (out.off_norm > target && out.sweeps < max_sweeps) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const C apq = a(p, q);
        const Real r = std::abs(apq);
        if (r == Real(0)) continue;
        const C phase = apq / r;  // a_pq = r e^{iφ}
        const Real tau = (a(q, q).real() - a(p, p).real()) / (2 * r);
        Real t;
        if (std::isinf(tau)) {
          t = 0;
        } else {
          t = (tau >= 0 ? Real(1) : Real(-1)) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        }
        const Real c = 1 / std::sqrt(1 + t * t);
        const Real s = t * c;
        // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
        const C jpp = c;
        const C jpq = s;
        const C jqp = -s * std::conj(phase);
        const C jqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const C akp = a(k, p);
          const C akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const C apk = a(p, k);
          const C aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        a(p, p) = C(a(p, p).real(), 0);
        a(q, q) = C(a(q, q).real(), 0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const C vkp = out.vectors(k, p);
          const C vkq = out.vectors(k, q);
          out.vectors(k, p) = vkp * jpp + vkq * jqp;
          out.vectors(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
    ++out.sweeps;
    out.off_norm = off_diagonal_norm(a);
  }
  out.converged = out.off_norm <= target;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = a(i, i).real();
  return out;
}

}  // namespace hlevy::detail
