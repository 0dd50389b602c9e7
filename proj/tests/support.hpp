#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "hlevy/hermitian.hpp"
#include "hlevy/rng.hpp"

namespace hlevy::test {

/// Hermitian matrix with independent standard normal coordinates.
inline HermitianMatrix random_hermitian(Eigen::Index d, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = scale * standard_normal(rng);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const cplx z(scale * standard_normal(rng), scale * standard_normal(rng));
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(m);
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(standard_normal(rng), standard_normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
}

/// Descending eigenvalues from Eigen's dense solver, used as an independent oracle.
inline Eigen::VectorXd oracle_eigenvalues(const HermitianMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(x.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

inline HermitianMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(d, d);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const cplx& v : r) m(i, j++) = v;
    ++i;
  }
  return HermitianMatrix(m);
}

}  // namespace hlevy::test
