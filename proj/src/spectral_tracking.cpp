#include "hlevy/spectral_tracking.hpp"

#include <cmath>
#include <string>

#include "hlevy/errors.hpp"

namespace hlevy {

SpectralDecomposition align_frames(const SpectralDecomposition& prev, const SpectralDecomposition& next) {
  if (prev.dim() != next.dim()) throw DimensionError("align_frames: dimension mismatch");
  SpectralDecomposition out = next;
  for (Eigen::Index m = 0; m < out.dim(); ++m) {
    const cplx ip = prev.U.col(m).dot(out.U.col(m));  // ⟨u_prev, u_next⟩ = u_prev* u_next
    const double a = std::abs(ip);
    if (a == 0.0) continue;
    out.U.col(m) *= std::conj(ip) / a;
  }
  return out;
}

namespace {

SpectralDecomposition decompose_at(const HermitianMatrix& x, double t) {
  try {
    return eig_hermitian(x);
  } catch (const NumericalError& e) {
    throw NumericalError("eigen_path: eigensolver failed at t=" + std::to_string(t) + ": " + e.what(),
                         e.residual());
  }
}

}  // namespace

EigenPath eigen_path(const SamplePath& path) {
  EigenPath ep;
  const std::size_t n = path.size();
  ep.times.reserve(n);
  ep.post.reserve(n);
  ep.pre.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = path.time(i);
    ep.times.push_back(t);
    std::optional<SpectralDecomposition> pre;
    if (path.points[i].jump >= 0) {
      pre = decompose_at(path.left_limit(i), t);
      if (i > 0) pre = align_frames(ep.post.back(), *pre);
    }
    SpectralDecomposition post = decompose_at(path.states[i], t);
    if (i > 0 && !pre) post = align_frames(ep.post.back(), post);

    for (const SpectralDecomposition* s : {pre ? &*pre : nullptr, &post}) {
      if (s == nullptr) continue;
      if (s->dim() > 1) ep.min_gap = std::min(ep.min_gap, s->min_gap());
      if (!s->simple) ep.degenerate_times.push_back(t);
    }
    ep.pre.push_back(std::move(pre));
    ep.post.push_back(std::move(post));
  }
  return ep;
}

}  // namespace hlevy
