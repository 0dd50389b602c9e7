#include "hlevy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hlevy/detail/jacobi.hpp"
#include "hlevy/errors.hpp"

namespace hlevy {

double SpectralDecomposition::min_gap() const {
  if (gaps.size() == 0) return std::numeric_limits<double>::infinity();
  return gaps.minCoeff();
}

Eigen::Index SpectralDecomposition::min_gap_index() const {
  if (gaps.size() == 0) return -1;
  Eigen::Index i = 0;
  gaps.minCoeff(&i);
  return i;
}

namespace {

Eigen::Index largest_entry_row(const Eigen::MatrixXcd& u, Eigen::Index col) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    const double a = std::abs(u(k, col));
    if (a > best_abs) {
      best_abs = a;
      best = k;
    }
  }
  return best;
}

}  // namespace

SpectralDecomposition make_decomposition(Eigen::VectorXd values, Eigen::MatrixXcd vectors, double scale) {
  const Eigen::Index d = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Eigen::Index> lead(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) lead[static_cast<std::size_t>(j)] = largest_entry_row(vectors, j);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return lead[static_cast<std::size_t>(a)] < lead[static_cast<std::size_t>(b)];
  });

  SpectralDecomposition out;
  out.lambdas.resize(d);
  out.U.resize(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const Eigen::Index src = order[static_cast<std::size_t>(m)];
    out.lambdas[m] = values[src];
    out.U.col(m) = vectors.col(src);
  }

  for (Eigen::Index m = 0; m < d; ++m) {
    Eigen::Index pivot = m;
    if (std::abs(out.U(m, m)) < kPivotFloor) {
      pivot = largest_entry_row(out.U, m);
      out.vg_fallback = true;
    }
    const cplx p = out.U(pivot, m);
    const double ap = std::abs(p);
    if (ap > 0.0) {
      out.U.col(m) *= std::conj(p) / ap;
      out.U(pivot, m) = cplx(std::abs(out.U(pivot, m)), 0.0);
    }
  }

  out.gap_tolerance = kRelativeGapTolerance * std::max(1.0, scale);
  out.gaps.resize(std::max<Eigen::Index>(d - 1, 0));
  for (Eigen::Index i = 0; i + 1 < d; ++i) out.gaps[i] = out.lambdas[i] - out.lambdas[i + 1];
  out.simple = d < 2 || out.gaps.minCoeff() > out.gap_tolerance;
  return out;
}

SpectralDecomposition eig_hermitian(const HermitianMatrix& x) {
  const double scale = frobenius_norm(x);
  auto res = detail::jacobi_eigen<double>(x.matrix(), kJacobiThreshold, kJacobiMaxSweeps);
  if (!res.converged) {
    throw NumericalError("eig_hermitian: no convergence after " + std::to_string(kJacobiMaxSweeps) +
                             " sweeps, off-diagonal residual " + std::to_string(res.off_norm),
                         res.off_norm);
  }
  auto out = make_decomposition(std::move(res.values), std::move(res.vectors), scale);
  out.sweeps = res.sweeps;
  return out;
}

VectorXld eigenvalues_extended(const MatrixXcld& x) {
  auto res = detail::jacobi_eigen<long double>(x, 1e-18L, kJacobiMaxSweeps);
  if (!res.converged) {
    throw NumericalError("eigenvalues_extended: no convergence", static_cast<double>(res.off_norm));
  }
  VectorXld v = res.values;
  std::sort(v.data(), v.data() + v.size(), std::greater<long double>());
  return v;
}

}  // namespace hlevy
