#pragma once

#include <Eigen/Dense>

#include "hlevy/hermitian.hpp"
#include "hlevy/levy_model.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

/// ∂λ_m with respect to the coordinates of X.
///
///   ∂λ_m/∂x_kk = |u_km|²
///   ∂λ_m/∂x_kh = 2 Re(ū_km u_hm)
///   ∂λ_m/∂y_kh = −2 Im(ū_km u_hm)
///
/// matrix_form is the spectral projector u_m u_m*, so that
/// trace_inner(matrix_form, Y) is the derivative along Y.
struct EigenGradient {
  Eigen::Index m = 0;
  Eigen::VectorXd grad;  // coordinate order of vectorize()
  HermitianMatrix matrix_form;
};

/// Pure second partials ∂²λ_m/∂x_kh² (k ≤ h) and ∂²λ_m/∂y_kh² (k < h),
/// stored at the coordinate index of the variable.
struct EigenSecondDerivatives {
  Eigen::Index m = 0;
  Eigen::VectorXd d2;      // length d², one entry per coordinate
  Eigen::MatrixXd d2_xx;   // d×d upper triangle incl. diagonal
  Eigen::MatrixXd d2_yy;   // d×d strict upper triangle
};

/// Throws GapError unless the decomposition is simple.
void require_simple(const SpectralDecomposition& decomp, const char* who);

EigenGradient eigenvalue_gradient(const SpectralDecomposition& decomp, Eigen::Index m);

/// Full coordinate Hessian H_ab = 2 Σ_{j≠m} Re[(U*E_aU)_mj conj((U*E_bU)_mj)] / (λ_m − λ_j).
Eigen::MatrixXd eigenvalue_hessian(const SpectralDecomposition& decomp, Eigen::Index m);

EigenSecondDerivatives eigenvalue_second_partials(const SpectralDecomposition& decomp, Eigen::Index m);

/// Itô drift ½ Σ_ab C_ab H_ab of λ_m for the Gaussian part with covariance
/// matrix C. For gue(σ²) this equals σ² Σ_{j≠m} 1/(λ_m − λ_j).
double drift_term(const SpectralDecomposition& decomp, const CovarianceOperator& a, Eigen::Index m);

/// Constant c in the gue reduction c·σ²·Σ_{j≠m} 1/(λ_m − λ_j) implied by
/// drift_term.
inline constexpr double kGueDriftConstant = 1.0;

/// Drift assembled from the pure second partials and pair coefficients only:
/// ½ Σ_{k≤h} A_{kh,kh} (∂²λ_m/∂x_kh² + ∂²λ_m/∂y_kh²). Kept to report its
/// disagreement with drift_term; it ignores the 1/2 weight of off-diagonal
/// coordinates and all cross terms.
double drift_term_pair_form(const SpectralDecomposition& decomp, const CovarianceOperator& a, Eigen::Index m);

/// First partials in the published coordinate presentation: 2|u_km|² on the
/// diagonal and +2 Im(ū_km u_hm) for y_kh. Differs from eigenvalue_gradient
/// by a factor 2 on the diagonal and the sign of the y partials.
Eigen::VectorXd published_gradient(const SpectralDecomposition& decomp, Eigen::Index m);

struct FdReport {
  Eigen::Index m = 0;
  double h = 0.0;
  double grad_err = 0.0;       // at h
  double grad_err_fine = 0.0;  // at h/10
  double hess_err = 0.0;       // pure second partials at h
  double hess_err_fine = 0.0;
  double order_estimate = 0.0;       // log10(grad_err / grad_err_fine); NaN when both vanish
  double hess_order_estimate = 0.0;  // same for second partials
  double scale = 1.0;                // max(1, 1/min_gap²)
  double min_gap = 0.0;
};

/// Central differences of λ_m along every coordinate direction, at h and
/// h/10, evaluated in extended precision. Throws GapError for a non-simple
/// spectrum and StencilError when min_gap ≤ 4√2·h (a stencil point could
/// reach an eigenvalue collision).
FdReport fd_check(const HermitianMatrix& x, Eigen::Index m, double h);

}  // namespace hlevy
