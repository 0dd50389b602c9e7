#pragma once

#include <Eigen/Dense>

#include "hlevy/hermitian.hpp"

namespace hlevy {

/// X = U·diag(lambdas)·U* with lambdas descending.
///
/// Phase convention: each column m of U is scaled by a unit complex number so
/// that U(m,m) is real and positive. If |U(m,m)| < 1e-12 the largest-modulus
/// entry of the column (first on ties) is made real positive instead and
/// `vg_fallback` is set.
struct SpectralDecomposition {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXcd U;
  Eigen::VectorXd gaps;  // lambdas[i] - lambdas[i+1]
  bool simple = true;
  bool vg_fallback = false;
  double gap_tolerance = 0.0;  // 1e-9 · max(1, ‖X‖_F)
  int sweeps = 0;

  Eigen::Index dim() const { return lambdas.size(); }
  double min_gap() const;
  /// Index i of the smallest gap (λ_i, λ_{i+1}); -1 when d < 2.
  Eigen::Index min_gap_index() const;
  Eigen::VectorXcd vector(Eigen::Index m) const { return U.col(m); }
};

inline constexpr double kJacobiThreshold = 1e-14;
inline constexpr int kJacobiMaxSweeps = 64;
inline constexpr double kPivotFloor = 1e-12;
inline constexpr double kRelativeGapTolerance = 1e-9;

/// Deterministic cyclic-Jacobi eigendecomposition.
/// Throws NumericalError (carrying the off-diagonal residual) if the sweep
/// limit is reached.
SpectralDecomposition eig_hermitian(const HermitianMatrix& x);

/// Builds the decomposition record (gaps, simple flag, phase convention)
/// from raw eigenpairs; `scale` is ‖X‖_F.
SpectralDecomposition make_decomposition(Eigen::VectorXd values, Eigen::MatrixXcd vectors, double scale);

using MatrixXcld = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Eigenvalues only, descending, computed in long double by the same Jacobi
/// sweep. Used by the finite-difference harness.
VectorXld eigenvalues_extended(const MatrixXcld& x);

}  // namespace hlevy
