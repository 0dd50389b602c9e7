#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hlevy/levy_model.hpp"
#include "hlevy/path_synthesis.hpp"
#include "hlevy/spectral_tracking.hpp"

namespace hlevy {

/// Contribution of one evaluation interval (t0, t1], including the jump at
/// t1 when there is one.
struct LedgerEntry {
  double t0 = 0.0;
  double t1 = 0.0;
  double stochastic_integral = 0.0;  // tr(Dλ(X(t0)) ΔX^c) + tr(Dλ(X(t1−)) ΔX(t1))
  double drift_integral = 0.0;       // drift_term(X(t0))·Δt
  double jump_correction = 0.0;      // Δλ − tr(Dλ(X(t1−)) ΔX(t1))
  double bridge = 0.0;               // exact λ difference over an excluded interval
  double gaussian_part = 0.0;        // tr(Dλ(X(t0)) ΔB), the martingale share of the first term
  double jump_stochastic = 0.0;      // tr(Dλ(X(t1−)) ΔX(t1))
  double compensator = 0.0;          // ∫ rate·E[λ(X+Y) − λ(X)] ds, trapezoid in time
  bool excluded = false;
  bool jump_excluded = false;
  bool has_jump = false;

  double total() const { return stochastic_integral + drift_integral + jump_correction + bridge; }
};

struct ReconstructionReport {
  Eigen::Index m = 0;
  int stride = 1;
  std::vector<double> times;           // evaluation times (grid every `stride` cells, jumps, T)
  std::vector<double> lambda;          // λ_m(X(t)) computed directly
  std::vector<double> reconstruction;  // Itô expansion
  std::vector<double> residual_path;
  std::vector<LedgerEntry> terms;      // terms[k] covers (times[k], times[k+1]]
  double sup_residual = 0.0;
  int steps = 0;                // continuous evaluation intervals
  int grid_exclusions = 0;      // degenerate left endpoints bridged exactly
  int jump_exclusions = 0;      // jumps from a degenerate X(t−)
  bool initial_bridge = false;  // first interval leaves the degenerate X(0) = 0
  std::size_t anchor = 0;       // index after the initial bridge
  double exclusion_fraction() const { return steps > 0 ? static_cast<double>(grid_exclusions) / steps : 0.0; }
  /// At most 0.1% of intervals excluded.
  bool valid() const { return exclusion_fraction() <= 1e-3; }
};

struct ReconstructOptions {
  int stride = 1;
  /// Monte Carlo draws per state for the jump compensator (0 skips it).
  int compensator_draws = 0;
  double cutoff = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// Itô reconstruction of every λ_m along the path with predictable
/// (left-point) evaluation. Jumps come from the exact ledger. A degenerate
/// left endpoint with a nonzero increment is bridged by the exact eigenvalue
/// difference and counted; the bridge out of X(0) = 0 is not counted.
std::vector<ReconstructionReport> reconstruct_all(const EigenPath& eigen, const SamplePath& path,
                                                  const LevyTriplet& triplet, const ReconstructOptions& opt = {});

ReconstructionReport reconstruct(const EigenPath& eigen, const SamplePath& path, const LevyTriplet& triplet,
                                 Eigen::Index m, const ReconstructOptions& opt = {});

struct MartingaleBVSplit {
  std::vector<double> M_path;
  std::vector<double> V_path;
  std::size_t anchor = 0;
  /// M at the final time minus M at the anchor.
  double martingale_increment() const { return M_path.back() - M_path[anchor]; }
};

/// M: Gaussian stochastic integral plus compensated jumps. V: drift_term
/// integral, the Ψ gradient integral and the compensator. M starts at the
/// reconstruction at the anchor, so M + V equals the reconstruction.
/// The report must have been built with compensator draws when the model
/// has jumps.
MartingaleBVSplit martingale_bv_split(const ReconstructionReport& report);

struct DysonDriftRow {
  Eigen::Index m = 0;
  double raw_mean = 0.0;  // mean of (λ_m(dt) − x0_m)/dt
  double raw_se = 0.0;
  double cv_mean = 0.0;  // mean of (λ_m(dt) − x0_m − ΔB_mm)/dt
  double cv_se = 0.0;
  double theory = 0.0;              // kGueDriftConstant·σ²·Σ 1/(x0_m − x0_j)
  double theory_doubled = 0.0;      // 2σ²·Σ 1/(x0_m − x0_j)
  double z_raw = 0.0;               // (raw_mean − theory)/raw_se
  double z_cv = 0.0;
  double z_cv_doubled = 0.0;        // (cv_mean − theory_doubled)/cv_se
};

/// One Gaussian step from diag(x0), averaged over n_paths. The control
/// variate subtracts ΔB_mm, which has mean zero and carries most of the
/// first-order noise.
std::vector<DysonDriftRow> dyson_drift_estimate(Eigen::Index d, double sigma2, const Eigen::VectorXd& x0,
                                                double dt, int n_paths, std::uint64_t seed);

/// Sup over m of the reconstruction residual at each stride, on one path.
std::vector<double> refinement_residuals(const EigenPath& eigen, const SamplePath& path,
                                         const LevyTriplet& triplet, const std::vector<int>& strides);

}  // namespace hlevy
