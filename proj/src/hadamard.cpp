#include "hlevy/hadamard.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hlevy/errors.hpp"

namespace hlevy {

void require_simple(const SpectralDecomposition& decomp, const char* who) {
  if (decomp.simple) return;
  const Eigen::Index i = decomp.min_gap_index();
  throw GapError(std::string(who) + ": eigenvalues " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                     " are not separated (gap " + std::to_string(decomp.gaps[i]) + ")",
                 static_cast<int>(i), static_cast<int>(i + 1), decomp.gaps[i]);
}

namespace {

void require_index(const SpectralDecomposition& decomp, Eigen::Index m) {
  if (m < 0 || m >= decomp.dim()) throw DimensionError("eigenvalue index out of range");
}

// v[a] = (U* E_a U)_{mj} for every coordinate direction E_a.
Eigen::VectorXcd direction_entries(const Eigen::MatrixXcd& u, Eigen::Index m, Eigen::Index j) {
  const Eigen::Index d = u.rows();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index k = 0; k < d; ++k) v[k] = std::conj(u(k, m)) * u(k, j);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index h = k + 1; h < d; ++h) {
      const Eigen::Index a = offdiag_coordinate(d, k, h);
      const cplx p = std::conj(u(k, m)) * u(h, j);
      const cplx q = std::conj(u(h, m)) * u(k, j);
      v[a] = p + q;
      v[a + 1] = cplx(0.0, 1.0) * (p - q);
    }
  }
  return v;
}

}  // namespace

EigenGradient eigenvalue_gradient(const SpectralDecomposition& decomp, Eigen::Index m) {
  require_simple(decomp, "eigenvalue_gradient");
  require_index(decomp, m);
  EigenGradient g;
  g.m = m;
  g.grad = direction_entries(decomp.U, m, m).real();
  g.matrix_form = HermitianMatrix::outer(decomp.U.col(m));
  return g;
}

Eigen::MatrixXd eigenvalue_hessian(const SpectralDecomposition& decomp, Eigen::Index m) {
  require_simple(decomp, "eigenvalue_hessian");
  require_index(decomp, m);
  const Eigen::Index d = decomp.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j == m) continue;
    const Eigen::VectorXcd v = direction_entries(decomp.U, m, j);
    const double w = 2.0 / (decomp.lambdas[m] - decomp.lambdas[j]);
    h.noalias() += w * (v.real() * v.real().transpose() + v.imag() * v.imag().transpose());
  }
  return h;
}

EigenSecondDerivatives eigenvalue_second_partials(const SpectralDecomposition& decomp, Eigen::Index m) {
  require_simple(decomp, "eigenvalue_second_partials");
  require_index(decomp, m);
  const Eigen::Index d = decomp.dim();
  EigenSecondDerivatives s;
  s.m = m;
  s.d2 = Eigen::VectorXd::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j == m) continue;
    const Eigen::VectorXcd v = direction_entries(decomp.U, m, j);
    s.d2 += (2.0 / (decomp.lambdas[m] - decomp.lambdas[j])) * v.cwiseAbs2();
  }
  s.d2_xx = Eigen::MatrixXd::Zero(d, d);
  s.d2_yy = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    s.d2_xx(k, k) = s.d2[k];
    for (Eigen::Index h = k + 1; h < d; ++h) {
      const Eigen::Index a = offdiag_coordinate(d, k, h);
      s.d2_xx(k, h) = s.d2[a];
      s.d2_yy(k, h) = s.d2[a + 1];
    }
  }
  return s;
}

double drift_term(const SpectralDecomposition& decomp, const CovarianceOperator& a, Eigen::Index m) {
  if (a.dim() != decomp.dim()) throw DimensionError("drift_term: covariance dimension differs");
  if (a.is_zero()) return 0.0;
  require_simple(decomp, "drift_term");
  require_index(decomp, m);
  const Eigen::Index d = decomp.dim();
  const Eigen::MatrixXd& c = a.matrix();
  // ½ Σ_ab C_ab H_ab with H from its rank-two terms; C is real symmetric.
  double s = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j == m) continue;
    const Eigen::VectorXcd v = direction_entries(decomp.U, m, j);
    const Eigen::VectorXd re = v.real();
    const Eigen::VectorXd im = v.imag();
    s += (re.dot(c * re) + im.dot(c * im)) / (decomp.lambdas[m] - decomp.lambdas[j]);
  }
  return s;
}

double drift_term_pair_form(const SpectralDecomposition& decomp, const CovarianceOperator& a, Eigen::Index m) {
  const auto s = eigenvalue_second_partials(decomp, m);
  const Eigen::Index d = decomp.dim();
  double v = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    v += a.pair_coefficient(k, k) * s.d2_xx(k, k);
    for (Eigen::Index h = k + 1; h < d; ++h) v += a.pair_coefficient(k, h) * (s.d2_xx(k, h) + s.d2_yy(k, h));
  }
  return 0.5 * v;
}

Eigen::VectorXd published_gradient(const SpectralDecomposition& decomp, Eigen::Index m) {
  Eigen::VectorXd g = eigenvalue_gradient(decomp, m).grad;
  const Eigen::Index d = decomp.dim();
  g.head(d) *= 2.0;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index h = k + 1; h < d; ++h) g[offdiag_coordinate(d, k, h) + 1] *= -1.0;
  return g;
}

namespace {

using ld = long double;

MatrixXcld to_extended(const HermitianMatrix& x) { return x.matrix().cast<std::complex<ld>>(); }

struct FdErrors {
  double grad = 0.0;
  double hess = 0.0;
};

FdErrors fd_errors(const MatrixXcld& x0, ld lam_m, Eigen::Index m, const Eigen::VectorXd& grad,
                   const Eigen::VectorXd& d2, ld h) {
  const Eigen::Index n = grad.size();
  const Eigen::Index d = x0.rows();
  FdErrors e;
  for (Eigen::Index a = 0; a < n; ++a) {
    const MatrixXcld dir = coordinate_direction(d, a).matrix().cast<std::complex<ld>>();
    const ld up = eigenvalues_extended(x0 + h * dir)[m];
    const ld dn = eigenvalues_extended(x0 - h * dir)[m];
    const ld g = (up - dn) / (2 * h);
    const ld s = (up - 2 * lam_m + dn) / (h * h);
    e.grad = std::max(e.grad, static_cast<double>(std::abs(g - static_cast<ld>(grad[a]))));
    e.hess = std::max(e.hess, static_cast<double>(std::abs(s - static_cast<ld>(d2[a]))));
  }
  return e;
}

double order_of(double coarse, double fine) {
  if (coarse == 0.0 && fine == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (fine == 0.0) return std::numeric_limits<double>::infinity();
  return std::log10(coarse / fine);
}

}  // namespace

FdReport fd_check(const HermitianMatrix& x, Eigen::Index m, double h) {
  if (!(h > 0.0)) throw PreconditionError("fd_check: step must be positive");
  const auto dec = eig_hermitian(x);
  require_simple(dec, "fd_check");
  require_index(dec, m);
  FdReport r;
  r.m = m;
  r.h = h;
  r.min_gap = dec.dim() > 1 ? dec.min_gap() : std::numeric_limits<double>::infinity();
  if (dec.dim() > 1 && r.min_gap <= 4.0 * std::sqrt(2.0) * h) {
    throw StencilError("fd_check: min gap " + std::to_string(r.min_gap) + " is within the stencil reach of h=" +
                       std::to_string(h));
  }
  r.scale = dec.dim() > 1 ? std::max(1.0, 1.0 / (r.min_gap * r.min_gap)) : 1.0;

  const auto grad = eigenvalue_gradient(dec, m).grad;
  const auto d2 = eigenvalue_second_partials(dec, m).d2;
  const MatrixXcld x0 = to_extended(x);
  const ld lam = eigenvalues_extended(x0)[m];
  const FdErrors coarse = fd_errors(x0, lam, m, grad, d2, static_cast<ld>(h));
  const FdErrors fine = fd_errors(x0, lam, m, grad, d2, static_cast<ld>(h) / 10);
  r.grad_err = coarse.grad;
  r.grad_err_fine = fine.grad;
  r.hess_err = coarse.hess;
  r.hess_err_fine = fine.hess;
  r.order_estimate = order_of(coarse.grad, fine.grad);
  r.hess_order_estimate = order_of(coarse.hess, fine.hess);
  return r;
}

}  // namespace hlevy
