#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hlevy/path_synthesis.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

/// Ordered eigenvalues and frames along a sample path. `post[i]` belongs to
/// X(t_i); `pre[i]` is set only at jump times and belongs to X(t_i−).
struct EigenPath {
  std::vector<double> times;
  std::vector<SpectralDecomposition> post;
  std::vector<std::optional<SpectralDecomposition>> pre;
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<double> degenerate_times;

  std::size_t size() const { return times.size(); }
  const Eigen::VectorXd& lambdas(std::size_t i) const { return post[i].lambdas; }
  const Eigen::MatrixXcd& frame(std::size_t i) const { return post[i].U; }
  /// Decomposition of X(t_i−).
  const SpectralDecomposition& left(std::size_t i) const { return pre[i] ? *pre[i] : post[i]; }
};

/// Decomposes every recorded state (and every pre-jump state). Frames are
/// phase-aligned between consecutive continuous times; never across jumps.
/// Degenerate times are listed, not dropped. Eigensolver failures are
/// rethrown as NumericalError naming the time.
EigenPath eigen_path(const SamplePath& path);

/// Re-phases each column of `next` by a unit scalar maximizing
/// Re⟨u_m(prev), u_m(next)⟩. Eigenvalues are untouched.
SpectralDecomposition align_frames(const SpectralDecomposition& prev, const SpectralDecomposition& next);

}  // namespace hlevy
