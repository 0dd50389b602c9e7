#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace hlevy {

using cplx = std::complex<double>;

/// Dense d×d complex Hermitian matrix.
///
/// The checked constructor rejects inputs whose Hermitian defect exceeds
/// 1e-14 (absolute) and stores (M + M*)/2, so every stored matrix is exactly
/// Hermitian: diagonal imaginary parts are zero and X(j,i) == conj(X(i,j)).
/// Sums, differences and real multiples of exactly Hermitian matrices are
/// again exactly Hermitian, so those operators skip validation.
class HermitianMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-14;

  HermitianMatrix() = default;
  /// Zero matrix of dimension d.
  explicit HermitianMatrix(Eigen::Index d);
  /// Validates and symmetrizes; throws ValidationError.
  explicit HermitianMatrix(const Eigen::MatrixXcd& m);

  /// Projects an arbitrary square matrix onto its Hermitian part without
  /// checking the defect. Use for products known to be Hermitian up to
  /// rounding, e.g. U·D·U*.
  static HermitianMatrix hermitian_part(const Eigen::MatrixXcd& m);
  static HermitianMatrix identity(Eigen::Index d);
  static HermitianMatrix diagonal(std::span<const double> values);
  /// Real multiple of the outer product u·u*.
  static HermitianMatrix outer(const Eigen::VectorXcd& u, double r = 1.0);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Unitary conjugation V·X·V*.
  HermitianMatrix conjugated(const Eigen::MatrixXcd& v) const;
  bool is_zero() const { return m_.isZero(0.0); }

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.dim() == b.dim() && a.m_ == b.m_;
  }

 private:
  struct Trusted {};
  HermitianMatrix(Trusted, Eigen::MatrixXcd m) : m_(std::move(m)) {}

  Eigen::MatrixXcd m_;
};

/// Real coordinates of a Hermitian matrix:
/// (x_11, ..., x_dd, then (x_ij, y_ij) for i < j in row-major pair order),
/// where X(i,j) = x_ij + i·y_ij.
class VectorizedHermitian {
 public:
  VectorizedHermitian() = default;
  /// Throws DimensionError unless coords.size() is a perfect square.
  explicit VectorizedHermitian(Eigen::VectorXd coords);

  Eigen::Index dim() const { return dim_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](Eigen::Index a) const { return coords_[a]; }

 private:
  Eigen::Index dim_ = 0;
  Eigen::VectorXd coords_;
};

/// Position of x_ij (i < j) in the coordinate vector; y_ij follows it.
Eigen::Index offdiag_coordinate(Eigen::Index d, Eigen::Index i, Eigen::Index j);

/// Hermitian direction ∂X/∂(coordinate a): E_kk, E_kh + E_hk, or i(E_kh − E_hk).
HermitianMatrix coordinate_direction(Eigen::Index d, Eigen::Index a);

/// Hermitian element Θ_a with tr(Θ_a X) equal to coordinate a of X:
/// E_kk, (E_kh + E_hk)/2, or i(E_kh − E_hk)/2.
HermitianMatrix dual_basis_element(Eigen::Index d, Eigen::Index a);

VectorizedHermitian vectorize(const HermitianMatrix& x);
HermitianMatrix devectorize(const VectorizedHermitian& v);
HermitianMatrix devectorize(std::span<const double> coords);

/// ‖X‖_F. In coordinates, ‖X‖_F² = Σ x_ii² + 2 Σ_{i<j} (x_ij² + y_ij²).
double frobenius_norm(const HermitianMatrix& x);

/// tr(XY), real for Hermitian X, Y. Equals the coordinate dot product with
/// off-diagonal coordinates weighted by 2.
double trace_inner(const HermitianMatrix& x, const HermitianMatrix& y);

/// ‖XY − YX‖_F.
double commutator_norm(const HermitianMatrix& x, const HermitianMatrix& y);

/// Number of eigenvalues with |λ| > tol · max(1, ‖X‖_F).
int numerical_rank(const HermitianMatrix& x, double tol);

}  // namespace hlevy
