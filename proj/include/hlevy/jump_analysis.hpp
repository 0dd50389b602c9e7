#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlevy/path_synthesis.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

struct Verdict {
  bool applicable = false;
  bool pass = false;
  double margin = 0.0;
  std::string note;
};

struct JumpTolerances {
  double comm_rel = 1e-10;  // commutator ≤ comm_rel·‖X_pre‖·‖X_post‖
  double jump_rel = 1e-6;   // |Δλ| > jump_rel·‖ΔX‖ counts as a jump
  double gap_rel = 1e-8;    // cross gap > gap_rel·max(1, ‖X_post‖)
};

struct JumpClassification {
  double t = 0.0;
  bool commutative = false;
  double commutator = 0.0;
  double comm_tol = 0.0;
  int rank = 0;
  /// Eigenvalues of X(t) that are not eigenvalues of X(t−) (multiset match
  /// within jump_tol). In the commutative case eigenvalues are paired through
  /// the common frame, which sorted order does not respect when a jump
  /// reorders the spectrum.
  int jumped_count = 0;
  /// Number of m with |λ_m(t) − λ_m(t−)| > jump_tol, sorted pairing.
  int sorted_jumped_count = 0;
  double jump_tol = 0.0;
  double min_cross_gap = 0.0;
  double gap_tol = 0.0;
  Eigen::VectorXd abs_delta_lambda;
  Verdict hoffman_wielandt;
  Verdict disjoint;
  Verdict simultaneity;
};

/// Classifies a jump and runs the applicable checks. Disjointness applies to
/// rank-one jumps; simultaneity to rank-one, noncommutative jumps of an
/// absolutely continuous model.
JumpClassification classify_jump(const JumpRecord& rec, const Eigen::VectorXd& lambdas_pre,
                                 const Eigen::VectorXd& lambdas_post, bool absolutely_continuous,
                                 const JumpTolerances& tol = {});

/// ‖Δλ‖₂ ≤ ‖ΔX‖_F + 1e-10; margin = ‖ΔX‖_F − ‖Δλ‖₂.
Verdict check_hoffman_wielandt(const JumpRecord& rec, const Eigen::VectorXd& lambdas_pre,
                               const Eigen::VectorXd& lambdas_post);

/// min_{i,j} |λ_i(post) − λ_j(pre)|.
double min_cross_gap(const Eigen::VectorXd& lambdas_pre, const Eigen::VectorXd& lambdas_post);

/// Pass iff the cross gap exceeds gap_tol. Throws PreconditionError unless
/// rank == 1.
Verdict check_disjoint_spectra(const Eigen::VectorXd& lambdas_pre, const Eigen::VectorXd& lambdas_post,
                               double gap_tol, int rank);

/// Pass iff jumped_count == d. Throws PreconditionError naming the violated
/// hypothesis (rank one, noncommutative, absolutely continuous). In d = 1
/// the commutation hypothesis is vacuous and the check passes.
Verdict check_simultaneity(const JumpClassification& c, Eigen::Index d, bool absolutely_continuous);

/// Eigenvalues (descending) of A + r·uu* from the secular equation in the
/// eigenbasis of A. Components with |⟨u_m, u⟩| ≤ 1e-14‖u‖ deflate and keep
/// λ_m. Throws GapError for a non-simple spectrum and NumericalError when
/// bisection does not converge within 200 iterations.
Eigen::VectorXd secular_rank_one_eigs(const SpectralDecomposition& a, double r, const Eigen::VectorXcd& u);

/// μ interlaces λ for the sign of r: r > 0 gives μ₁ ≥ λ₁ and
/// λ_m ≤ μ_m ≤ λ_{m−1}; r < 0 the mirror image.
bool interlaces(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& mu, double r);

/// Decade histogram of |Δλ_m|/‖ΔX‖_F, keyed by floor(log10); exact zeros go
/// to the key -99.
class DeltaLambdaHistogram {
 public:
  void add(const JumpClassification& c, double delta_norm);
  const std::map<int, long>& jumped() const { return jumped_; }
  const std::map<int, long>& still() const { return still_; }
  /// Smallest relative |Δλ| among entries counted as jumped, largest among
  /// the rest; the calibration is sound when the first exceeds the second.
  double min_jumped() const { return min_jumped_; }
  double max_still() const { return max_still_; }

 private:
  std::map<int, long> jumped_;
  std::map<int, long> still_;
  double min_jumped_ = std::numeric_limits<double>::infinity();
  double max_still_ = 0.0;
};

}  // namespace hlevy
