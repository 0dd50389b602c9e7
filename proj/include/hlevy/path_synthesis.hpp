#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hlevy/hermitian.hpp"
#include "hlevy/levy_model.hpp"

namespace hlevy {

struct SimulationConfig {
  double t_max = 1.0;
  int steps = 100;
  double cutoff = 1e-3;
  std::uint64_t seed = 0;
  int paths = 1;

  void validate() const;
  double dt() const { return t_max / steps; }
};

struct JumpRecord {
  double t = 0.0;
  HermitianMatrix x_pre;
  HermitianMatrix x_post;
  HermitianMatrix delta;  // x_post - x_pre, exactly
  int rank = 0;
  double commutator = 0.0;      // ‖[X_post, X_pre]‖_F
  Eigen::VectorXd delta_lambda;  // λ(X_post) - λ(X_pre), both sorted descending
};

/// One recorded time of a path.
struct PathPoint {
  double t = 0.0;
  int grid = -1;  // grid index k (t = k·dt) or -1
  int jump = -1;  // index into SamplePath::jumps or -1
};

struct SamplePath {
  std::vector<PathPoint> points;
  std::vector<HermitianMatrix> states;  // X(t), post-jump at jump times
  /// Gaussian increment over (t_{i-1}, t_i]; entry 0 is zero.
  std::vector<HermitianMatrix> gaussian;
  std::vector<JumpRecord> jumps;
  HermitianMatrix psi_eff;  // drift actually integrated
  ModelFlags flags;
  double dt = 0.0;
  int steps = 0;

  Eigen::Index dim() const { return states.empty() ? 0 : states.front().dim(); }
  std::size_t size() const { return points.size(); }
  double time(std::size_t i) const { return points[i].t; }
  /// X(t_i−): the pre-jump state at jump times, else the state.
  const HermitianMatrix& left_limit(std::size_t i) const;
};

/// Path of X on [0, T] from the Lévy–Itô decomposition. The jump stream is
/// drawn first from its own generator, so it does not depend on `steps`.
SamplePath simulate_path(const LevyTriplet& triplet, const SimulationConfig& cfg, std::uint64_t path_index);

/// Hermitian Brownian motion built entrywise: diagonal variance σ²t,
/// off-diagonal real and imaginary parts σ²t/2 each.
SamplePath simulate_dyson_entrywise(Eigen::Index d, double sigma2, const SimulationConfig& cfg,
                                    std::uint64_t path_index);

/// X(t−) at a recorded time; throws PreconditionError for unrecorded times.
HermitianMatrix pre_jump_state(const SamplePath& path, double t);

/// Builds the record for a jump X_pre -> X_post; delta is X_post − X_pre.
JumpRecord make_jump_record(double t, const HermitianMatrix& x_pre, const HermitianMatrix& x_post);

}  // namespace hlevy
