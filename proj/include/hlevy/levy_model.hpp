#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hlevy/hermitian.hpp"
#include "hlevy/rng.hpp"

namespace hlevy {

// ---------------------------------------------------------------------------
// Gaussian part
// ---------------------------------------------------------------------------

/// Covariance operator 𝒜 of the Hermitian Brownian component.
///
/// Stored in vectorized coordinates as the d²×d² matrix C with
/// C_ab = tr(Θ_a 𝒜 Θ_b), Θ_a the dual basis of the coordinates, so that C is
/// the covariance of vectorize(B(1)).
class CovarianceOperator {
 public:
  enum class Form { kGue, kKronecker, kTraceIdentity, kExplicit };

  /// 𝒜Θ = σ²Θ.
  static CovarianceOperator gue(Eigen::Index d, double sigma2);
  /// 𝒜Θ = Σ₁ΘΣ₂ with Σ₁, Σ₂ nonnegative definite. When Σ₁ and Σ₂ do not
  /// commute the bilinear form keeps only Re tr(Θ₁Σ₁Θ₂Σ₂).
  static CovarianceOperator kronecker(const HermitianMatrix& sigma1, const HermitianMatrix& sigma2);
  /// 𝒜Θ = tr(Θ)σ²I.
  static CovarianceOperator trace_identity(Eigen::Index d, double sigma2);
  /// Explicit C; throws ValidationError unless symmetric PSD
  /// (eigenvalues ≥ −1e-12·‖C‖).
  static CovarianceOperator explicit_matrix(const Eigen::MatrixXd& c);
  static CovarianceOperator zero(Eigen::Index d);

  Form form() const { return form_; }
  Eigen::Index dim() const { return dim_; }
  double sigma2() const { return sigma2_; }
  const HermitianMatrix& sigma1_matrix() const { return s1_; }
  const HermitianMatrix& sigma2_matrix() const { return s2_; }

  /// C in vectorized coordinates.
  const Eigen::MatrixXd& matrix() const { return c_; }
  /// Factor L with L·Lᵀ = C.
  const Eigen::MatrixXd& factor() const { return factor_; }
  bool is_zero() const { return c_.isZero(0.0); }

  /// 𝒜Θ as a Hermitian matrix.
  HermitianMatrix apply(const HermitianMatrix& theta) const;

  /// Pair-index coefficient A_{kh,kh} read from the named form
  /// (gue: σ²; kronecker: Σ₁(k,k)Σ₂(h,h); trace_identity: σ² on k = h, else 0).
  /// Throws PreconditionError for explicit C.
  double pair_coefficient(Eigen::Index k, Eigen::Index h) const;

 private:
  CovarianceOperator() = default;

  Form form_ = Form::kExplicit;
  Eigen::Index dim_ = 0;
  double sigma2_ = 0.0;
  HermitianMatrix s1_;
  HermitianMatrix s2_;
  Eigen::MatrixXd c_;
  Eigen::MatrixXd factor_;
};

/// C for the operator (named as an operation for symmetry with the rest of
/// the model API).
inline const Eigen::MatrixXd& covariance_matrix(const CovarianceOperator& a) { return a.matrix(); }

/// One draw of B_𝒜(t + dt) − B_𝒜(t).
HermitianMatrix gaussian_increment(const CovarianceOperator& a, double dt, Rng& rng);

// ---------------------------------------------------------------------------
// Jump part
// ---------------------------------------------------------------------------

/// Radial law ρ of the jump size r > 0.
///
///   point_mass(r0):                 ρ = δ_{r0}
///   exponential(β):                 ρ(dr) = β e^{−βr} dr
///   stable_truncated(α, rmin, rmax): ρ(dr) = r^{−1−α} dr on (rmin, rmax)
///
/// The family's `rate` multiplies ρ. When `symmetric` is set the jump sign is
/// ±1 with probability ½ each.
struct RadialLaw {
  enum class Kind { kPointMass, kExponential, kStableTruncated };

  Kind kind = Kind::kPointMass;
  double r0 = 1.0;
  double beta = 1.0;
  double alpha = 1.0;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  bool symmetric = false;

  static RadialLaw point_mass(double r0, bool symmetric = false);
  static RadialLaw exponential(double beta, bool symmetric = false);
  static RadialLaw stable_truncated(double alpha, double r_min, double r_max, bool symmetric = false);

  /// ∫_{(a,b]} r^p ρ(dr); +∞ when divergent.
  double moment(int p, double a, double b) const;
  /// ρ((a, ∞)).
  double mass_above(double a) const { return moment(0, a, std::numeric_limits<double>::infinity()); }
  /// Draw from ρ restricted to (a, ∞) and normalized.
  double sample_above(double a, Rng& rng) const;
  /// Density g(u) in closed form, for reports.
  std::string density() const;
  void validate() const;
};

/// Scalar compound-Poisson-type jump specification: rate · ρ.
struct ScalarJumpSpec {
  double rate = 0.0;
  RadialLaw radial;
};

/// Jumps r·uu*, u uniform on the unit sphere of C^d.
struct RankOneUniform {
  double rate = 0.0;
  RadialLaw radial;
};

/// X = U diag(ℓ₁(t), ..., ℓ_d(t)) U* with independent scalar Lévy ℓ_i.
struct DiagonalIndependent {
  std::vector<ScalarJumpSpec> coordinates;
  Eigen::MatrixXcd frame;  // unitary U
};

/// Jump law for the full-rank compound Poisson family.
struct FullRankSampler {
  enum class Kind {
    kScalarIdentity,  // c·I (±c·I when symmetric)
    kFrameDiagonal,   // U diag(g) U*, g_i ~ N(0, scale²)
    kGue,             // c·I + scale·G, G a standard GUE matrix
  };
  Kind kind = Kind::kScalarIdentity;
  double c = 1.0;
  double scale = 1.0;
  bool symmetric = false;
  Eigen::MatrixXcd frame;
};

/// Compound Poisson with a user-chosen Hermitian jump law. Jumps with
/// ‖y‖ ≤ ε are thinned out at sampling time.
struct FullRankCompoundPoisson {
  double rate = 0.0;
  FullRankSampler sampler;
};

/// X = [Y] = Σ ΔY ΔY* with ΔY = ρ·v, v uniform on the sphere and ρ drawn
/// from `vector_jumps.radial`; the matrix jump has norm ρ².
struct QvVectorLevy {
  ScalarJumpSpec vector_jumps;
};

/// X = [Y₁] − [Y₂] for independent vector jump specs.
struct QvDifference {
  ScalarJumpSpec positive;
  ScalarJumpSpec negative;
};

struct LevyMeasureSpec {
  using Family = std::variant<RankOneUniform, DiagonalIndependent, FullRankCompoundPoisson, QvVectorLevy, QvDifference>;

  Eigen::Index dim = 0;
  Family family;

  std::string family_name() const;
  /// Throws ModelError on inconsistent parameters.
  void validate() const;
};

struct TimedJump {
  double t = 0.0;
  HermitianMatrix delta;
};

/// Intensity ν({‖y‖ > ε}) of the jumps that sample_jumps emits. For the
/// thinned full-rank samplers this is the proposal rate (an upper bound).
/// Throws ModelError when infinite.
double jump_intensity(const LevyMeasureSpec& nu, double eps);

/// Jumps with ‖y‖ > ε on (t0, t1], times strictly increasing.
std::vector<TimedJump> sample_jumps(const LevyMeasureSpec& nu, double t0, double t1, double eps, Rng& rng);

/// One jump from the normalized restriction of ν to {‖y‖ > ε}. Returns
/// nullopt when a thinned proposal fell below the cutoff.
std::optional<HermitianMatrix> sample_jump_size(const LevyMeasureSpec& nu, double eps, Rng& rng);

/// ∫_{ε<‖y‖≤1} y ν(dy). Throws NeedsQuadratureError when no closed form exists.
HermitianMatrix compensator_drift(const LevyMeasureSpec& nu, double eps);

struct ConditionD {
  enum class Status { kHolds, kFails, kNotApplicable };
  Status status = Status::kNotApplicable;
  bool self_decomposable = false;
  std::string density;
  std::string reason;
};

/// Analytic verdict on the radial divergence condition.
ConditionD condition_d_check(const std::optional<LevyMeasureSpec>& nu);

// ---------------------------------------------------------------------------
// Triplet
// ---------------------------------------------------------------------------

struct LevyTriplet {
  CovarianceOperator a = CovarianceOperator::zero(0);
  std::optional<LevyMeasureSpec> nu;
  HermitianMatrix psi;

  Eigen::Index dim() const { return a.dim(); }
  /// Throws ModelError on inconsistent dimensions or an all-zero triplet.
  void validate() const;
};

struct ModelFlags {
  bool absolutely_continuous = false;
  bool simple_spectrum_as = false;
  std::string reason;
};

ModelFlags model_validity_flags(const LevyTriplet& triplet);

/// Effective drift Ψ − ∫_{ε<‖y‖≤1} y ν(dy) used when the (ε, 1] band is
/// simulated as a plain sum of jumps.
HermitianMatrix effective_drift(const LevyTriplet& triplet, double eps);

}  // namespace hlevy
