#include "hlevy/hermitian.hpp"

#include <cmath>
#include <string>

#include "hlevy/errors.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

namespace {

void require_same_dim(const HermitianMatrix& x, const HermitianMatrix& y, const char* op) {
  if (x.dim() != y.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch " + std::to_string(x.dim()) +
                         " vs " + std::to_string(y.dim()));
  }
}

Eigen::Index perfect_square_root(Eigen::Index n) {
  auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  while (d * d > n) --d;
  while ((d + 1) * (d + 1) <= n) ++d;
  if (d * d != n) {
    throw DimensionError("coordinate vector length " + std::to_string(n) +
                         " is not a perfect square");
  }
  return d;
}

}  // namespace

HermitianMatrix::HermitianMatrix(Eigen::Index d) : m_(Eigen::MatrixXcd::Zero(d, d)) {}

HermitianMatrix::HermitianMatrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("Hermitian matrix must be square");
  }
  if (!m.allFinite()) {
    throw ValidationError("Hermitian matrix has non-finite entries");
  }
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (m.size() > 0 && defect > kHermitianTolerance) {
    throw ValidationError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitian_part(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("Hermitian part of a non-square matrix");
  }
  return HermitianMatrix(Trusted{}, 0.5 * (m + m.adjoint()));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index d) {
  return HermitianMatrix(Trusted{}, Eigen::MatrixXcd::Identity(d, d));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  const auto d = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix(Trusted{}, std::move(m));
}

HermitianMatrix HermitianMatrix::outer(const Eigen::VectorXcd& u, double r) {
  const Eigen::Index d = u.size();
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = r * std::norm(u[i]);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      m(i, j) = r * u[i] * std::conj(u[j]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix(Trusted{}, std::move(m));
}

HermitianMatrix HermitianMatrix::conjugated(const Eigen::MatrixXcd& v) const {
  return hermitian_part(v * m_ * v.adjoint());
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  require_same_dim(*this, o, "operator+");
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  require_same_dim(*this, o, "operator-");
  m_ -= o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

VectorizedHermitian::VectorizedHermitian(Eigen::VectorXd coords)
    : dim_(perfect_square_root(coords.size())), coords_(std::move(coords)) {}

Eigen::Index offdiag_coordinate(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  // Pairs (0,1),(0,2),...,(0,d-1),(1,2),... each take two slots after the diagonal.
  const Eigen::Index before = i * (2 * d - i - 1) / 2;
  return d + 2 * (before + (j - i - 1));
}

namespace {

struct CoordinateRole {
  Eigen::Index k;
  Eigen::Index h;
  bool imaginary;
};

CoordinateRole coordinate_role(Eigen::Index d, Eigen::Index a) {
  if (a < 0 || a >= d * d) throw DimensionError("coordinate index out of range");
  if (a < d) return {a, a, false};
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index h = k + 1; h < d; ++h) {
      const Eigen::Index base = offdiag_coordinate(d, k, h);
      if (a == base) return {k, h, false};
      if (a == base + 1) return {k, h, true};
    }
  }
  throw DimensionError("coordinate index out of range");
}

}  // namespace

HermitianMatrix coordinate_direction(Eigen::Index d, Eigen::Index a) {
  const auto [k, h, imag] = coordinate_role(d, a);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  if (k == h) {
    m(k, k) = 1.0;
  } else if (!imag) {
    m(k, h) = 1.0;
    m(h, k) = 1.0;
  } else {
    m(k, h) = cplx(0.0, 1.0);
    m(h, k) = cplx(0.0, -1.0);
  }
  return HermitianMatrix(m);
}

HermitianMatrix dual_basis_element(Eigen::Index d, Eigen::Index a) {
  const auto [k, h, imag] = coordinate_role(d, a);
  (void)imag;
  HermitianMatrix e = coordinate_direction(d, a);
  return k == h ? e : 0.5 * e;
}

VectorizedHermitian vectorize(const HermitianMatrix& x) {
  const Eigen::Index d = x.dim();
  Eigen::VectorXd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = x(i, i).real();
  Eigen::Index a = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v[a++] = x(i, j).real();
      v[a++] = x(i, j).imag();
    }
  }
  return VectorizedHermitian(std::move(v));
}

HermitianMatrix devectorize(std::span<const double> coords) {
  const auto n = static_cast<Eigen::Index>(coords.size());
  const Eigen::Index d = perfect_square_root(n);
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = cplx(coords[static_cast<std::size_t>(i)], 0.0);
  std::size_t a = static_cast<std::size_t>(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double re = coords[a++];
      const double im = coords[a++];
      m(i, j) = cplx(re, im);
      m(j, i) = cplx(re, -im);
    }
  }
  return HermitianMatrix(m);
}

HermitianMatrix devectorize(const VectorizedHermitian& v) {
  return devectorize(std::span<const double>(v.coords().data(), static_cast<std::size_t>(v.coords().size())));
}

double frobenius_norm(const HermitianMatrix& x) { return x.matrix().norm(); }

double trace_inner(const HermitianMatrix& x, const HermitianMatrix& y) {
  require_same_dim(x, y, "trace_inner");
  // tr(XY) = Σ_ij X_ij Y_ji = Σ_ij X_ij conj(Y_ij) for Hermitian Y.
  double s = 0.0;
  const Eigen::Index d = x.dim();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      s += (x(i, j) * y(j, i)).real();
    }
  }
  return s;
}

double commutator_norm(const HermitianMatrix& x, const HermitianMatrix& y) {
  require_same_dim(x, y, "commutator_norm");
  return (x.matrix() * y.matrix() - y.matrix() * x.matrix()).norm();
}

int numerical_rank(const HermitianMatrix& x, double tol) {
  if (!(tol > 0.0)) throw ValidationError("numerical_rank: tol must be positive");
  if (x.dim() == 0) return 0;
  const double cut = tol * std::max(1.0, frobenius_norm(x));
  const auto dec = eig_hermitian(x);
  int r = 0;
  for (Eigen::Index i = 0; i < dec.lambdas.size(); ++i) {
    if (std::abs(dec.lambdas[i]) > cut) ++r;
  }
  return r;
}

}  // namespace hlevy
