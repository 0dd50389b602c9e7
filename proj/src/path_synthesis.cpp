#include "hlevy/path_synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "hlevy/errors.hpp"
#include "hlevy/rng.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

void SimulationConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  if (steps < 1) throw ValidationError("steps must be >= 1");
  if (paths < 1) throw ValidationError("paths must be >= 1");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ValidationError("cutoff must lie in (0, 1]");
}

const HermitianMatrix& SamplePath::left_limit(std::size_t i) const {
  const int j = points[i].jump;
  return j >= 0 ? jumps[static_cast<std::size_t>(j)].x_pre : states[i];
}

JumpRecord make_jump_record(double t, const HermitianMatrix& x_pre, const HermitianMatrix& x_post) {
  JumpRecord r;
  r.t = t;
  r.x_pre = x_pre;
  r.x_post = x_post;
  r.delta = r.x_post - r.x_pre;
  r.rank = numerical_rank(r.delta, 1e-10);
  r.commutator = commutator_norm(r.x_post, r.x_pre);
  r.delta_lambda = eig_hermitian(r.x_post).lambdas - eig_hermitian(r.x_pre).lambdas;
  return r;
}

namespace {

// Merges the grid with jump times; a jump within 1e-15·T of a grid node is
// snapped onto that node.
std::vector<PathPoint> merge_times(const SimulationConfig& cfg, const std::vector<TimedJump>& jumps) {
  std::vector<PathPoint> pts;
  pts.reserve(static_cast<std::size_t>(cfg.steps) + 1 + jumps.size());
  const double dt = cfg.dt();
  const double tol = 1e-15 * cfg.t_max;
  std::size_t j = 0;
  for (int k = 0; k <= cfg.steps; ++k) {
    const double tk = k == cfg.steps ? cfg.t_max : k * dt;
    while (j < jumps.size() && jumps[j].t < tk - tol) {
      pts.push_back({jumps[j].t, -1, static_cast<int>(j)});
      ++j;
    }
    PathPoint p{tk, k, -1};
    if (j < jumps.size() && std::abs(jumps[j].t - tk) <= tol && k > 0) {
      p.jump = static_cast<int>(j);
      ++j;
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

SamplePath simulate_path(const LevyTriplet& triplet, const SimulationConfig& cfg, std::uint64_t path_index) {
  triplet.validate();
  cfg.validate();
  const Eigen::Index d = triplet.dim();

  std::vector<TimedJump> timed;
  if (triplet.nu) {
    Rng jr = make_rng(cfg.seed, path_index, Stream::kJumps);
    timed = sample_jumps(*triplet.nu, 0.0, cfg.t_max, cfg.cutoff, jr);
  }
  Rng gr = make_rng(cfg.seed, path_index, Stream::kGaussian);

  SamplePath path;
  path.psi_eff = effective_drift(triplet, cfg.cutoff);
  path.flags = model_validity_flags(triplet);
  path.dt = cfg.dt();
  path.steps = cfg.steps;
  path.points = merge_times(cfg, timed);

  const bool has_gauss = !triplet.a.is_zero();
  HermitianMatrix b_cum(d);
  HermitianMatrix j_cum(d);
  path.states.reserve(path.points.size());
  path.gaussian.reserve(path.points.size());
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const PathPoint& p = path.points[i];
    HermitianMatrix db(d);
    if (i > 0 && has_gauss) {
      db = gaussian_increment(triplet.a, p.t - path.points[i - 1].t, gr);
      b_cum += db;
    }
    path.gaussian.push_back(db);
    HermitianMatrix x = path.psi_eff * p.t + b_cum + j_cum;
    if (p.jump >= 0) {
      const TimedJump& tj = timed[static_cast<std::size_t>(p.jump)];
      JumpRecord rec = make_jump_record(p.t, x, x + tj.delta);
      j_cum += tj.delta;
      x = rec.x_post;
      path.jumps.push_back(std::move(rec));
      path.points[i].jump = static_cast<int>(path.jumps.size()) - 1;
    }
    path.states.push_back(std::move(x));
  }
  return path;
}

SamplePath simulate_dyson_entrywise(Eigen::Index d, double sigma2, const SimulationConfig& cfg,
                                    std::uint64_t path_index) {
  cfg.validate();
  if (d < 1) throw ValidationError("dimension must be >= 1");
  if (!(sigma2 >= 0.0)) throw ValidationError("sigma2 must be nonnegative");
  Rng gr = make_rng(cfg.seed, path_index, Stream::kGaussian);

  SamplePath path;
  path.psi_eff = HermitianMatrix(d);
  path.flags.absolutely_continuous = sigma2 > 0.0;
  path.flags.simple_spectrum_as = sigma2 > 0.0;
  path.flags.reason = sigma2 > 0.0 ? "Gaussian component present" : "zero process";
  path.dt = cfg.dt();
  path.steps = cfg.steps;
  path.points = merge_times(cfg, {});

  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    Eigen::MatrixXcd db = Eigen::MatrixXcd::Zero(d, d);
    if (i > 0 && sigma2 > 0.0) {
      const double h = path.points[i].t - path.points[i - 1].t;
      const double sd = std::sqrt(sigma2 * h);
      const double so = std::sqrt(0.5 * sigma2 * h);
      for (Eigen::Index k = 0; k < d; ++k) db(k, k) = sd * standard_normal(gr);
      for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = k + 1; l < d; ++l) {
          const double re = so * standard_normal(gr);
          const double im = so * standard_normal(gr);
          db(k, l) = cplx(re, im);
          db(l, k) = cplx(re, -im);
        }
      }
      b += db;
    }
    path.gaussian.push_back(HermitianMatrix(db));
    path.states.push_back(HermitianMatrix(b));
  }
  return path;
}

HermitianMatrix pre_jump_state(const SamplePath& path, double t) {
  const auto it = std::lower_bound(path.points.begin(), path.points.end(), t,
                                   [](const PathPoint& p, double v) { return p.t < v; });
  if (it == path.points.end() || it->t != t) {
    throw PreconditionError("pre_jump_state: time " + std::to_string(t) + " is not recorded on the path");
  }
  return path.left_limit(static_cast<std::size_t>(it - path.points.begin()));
}

}  // namespace hlevy
