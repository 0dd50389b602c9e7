#include "hlevy/sde_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hlevy/errors.hpp"
#include "hlevy/hadamard.hpp"
#include "hlevy/rng.hpp"

namespace hlevy {

namespace {

std::vector<std::size_t> evaluation_indices(const SamplePath& path, int stride) {
  std::vector<std::size_t> idx;
  const std::size_t n = path.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PathPoint& p = path.points[i];
    if (i == 0 || i + 1 == n || p.jump >= 0 || (p.grid >= 0 && p.grid % stride == 0)) idx.push_back(i);
  }
  return idx;
}

// Monte Carlo estimate of rate·E[λ(X + Y) − λ(X)] for every m.
class CompensatorEstimator {
 public:
  CompensatorEstimator(const LevyTriplet& triplet, const ReconstructOptions& opt)
      : nu_(triplet.nu ? &*triplet.nu : nullptr),
        draws_(opt.compensator_draws),
        cutoff_(opt.cutoff),
        rng_(make_rng(opt.seed, opt.path_index, Stream::kCompensator)) {
    if (nu_ && draws_ > 0) rate_ = jump_intensity(*nu_, cutoff_);
  }

  bool active() const { return nu_ != nullptr && draws_ > 0 && rate_ > 0.0; }

  Eigen::VectorXd at(const HermitianMatrix& x, const Eigen::VectorXd& lam) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(lam.size());
    for (int k = 0; k < draws_; ++k) {
      const auto y = sample_jump_size(*nu_, cutoff_, rng_);
      if (!y) continue;
      s += eig_hermitian(x + *y).lambdas - lam;
    }
    return s * (rate_ / draws_);
  }

 private:
  const LevyMeasureSpec* nu_;
  int draws_;
  double cutoff_;
  double rate_ = 0.0;
  Rng rng_;
};

}  // namespace

std::vector<ReconstructionReport> reconstruct_all(const EigenPath& eigen, const SamplePath& path,
                                                  const LevyTriplet& triplet, const ReconstructOptions& opt) {
  if (opt.stride < 1) throw PreconditionError("reconstruct: stride must be >= 1");
  if (eigen.size() != path.size()) throw PreconditionError("reconstruct: eigen path does not match sample path");
  const Eigen::Index d = path.dim();
  if (triplet.dim() != d) throw DimensionError("reconstruct: triplet dimension differs from path");
  const auto idx = evaluation_indices(path, opt.stride);
  if (idx.size() < 2) throw PreconditionError("reconstruct: no usable evaluation interval");

  std::vector<ReconstructionReport> reps(static_cast<std::size_t>(d));
  for (Eigen::Index m = 0; m < d; ++m) {
    auto& r = reps[static_cast<std::size_t>(m)];
    r.m = m;
    r.stride = opt.stride;
    const double l0 = eigen.lambdas(0)[m];
    r.times.push_back(path.time(0));
    r.lambda.push_back(l0);
    r.reconstruction.push_back(l0);
    r.residual_path.push_back(0.0);
  }

  CompensatorEstimator comp(triplet, opt);
  std::optional<Eigen::VectorXd> comp_left;
  Eigen::VectorXd rec = eigen.lambdas(0);

  for (std::size_t k = 1; k < idx.size(); ++k) {
    const std::size_t a = idx[k - 1];
    const std::size_t b = idx[k];
    const double t0 = path.time(a);
    const double t1 = path.time(b);
    const double dt = t1 - t0;
    const SpectralDecomposition& da = eigen.post[a];
    const SpectralDecomposition& db_pre = eigen.left(b);
    const HermitianMatrix dxc = path.left_limit(b) - path.states[a];
    HermitianMatrix dB(d);
    for (std::size_t i = a + 1; i <= b; ++i) dB += path.gaussian[i];

    std::vector<LedgerEntry> e(static_cast<std::size_t>(d));
    for (auto& x : e) {
      x.t0 = t0;
      x.t1 = t1;
    }
    const bool first = k == 1;
    if (da.simple) {
      for (Eigen::Index m = 0; m < d; ++m) {
        const HermitianMatrix p = HermitianMatrix::outer(da.U.col(m));
        auto& x = e[static_cast<std::size_t>(m)];
        x.stochastic_integral = trace_inner(p, dxc);
        x.gaussian_part = trace_inner(p, dB);
        x.drift_integral = drift_term(da, triplet.a, m) * dt;
      }
    } else if (!dxc.is_zero()) {
      for (Eigen::Index m = 0; m < d; ++m) {
        auto& x = e[static_cast<std::size_t>(m)];
        x.bridge = db_pre.lambdas[m] - da.lambdas[m];
        x.excluded = !first;
      }
      if (first) {
        for (auto& r : reps) r.initial_bridge = true;
      } else {
        for (auto& r : reps) ++r.grid_exclusions;
      }
    }
    for (auto& r : reps) ++r.steps;

    if (comp.active()) {
      if (!comp_left) comp_left = comp.at(path.states[a], da.lambdas);
      const Eigen::VectorXd right = comp.at(path.left_limit(b), db_pre.lambdas);
      for (Eigen::Index m = 0; m < d; ++m) e[static_cast<std::size_t>(m)].compensator = 0.5 * dt * ((*comp_left)[m] + right[m]);
      comp_left = right;
    }

    const int j = path.points[b].jump;
    if (j >= 0) {
      const JumpRecord& jr = path.jumps[static_cast<std::size_t>(j)];
      const SpectralDecomposition& dpost = eigen.post[b];
      for (Eigen::Index m = 0; m < d; ++m) {
        auto& x = e[static_cast<std::size_t>(m)];
        x.has_jump = true;
        const double dl = dpost.lambdas[m] - db_pre.lambdas[m];
        if (db_pre.simple) {
          x.jump_stochastic = trace_inner(HermitianMatrix::outer(db_pre.U.col(m)), jr.delta);
          x.jump_correction = dl - x.jump_stochastic;
        } else {
          x.jump_correction = dl;
          x.jump_excluded = true;
        }
        x.stochastic_integral += x.jump_stochastic;
      }
      if (!db_pre.simple)
        for (auto& r : reps) ++r.jump_exclusions;
      comp_left.reset();
    }

    for (Eigen::Index m = 0; m < d; ++m) {
      auto& r = reps[static_cast<std::size_t>(m)];
      const auto& x = e[static_cast<std::size_t>(m)];
      rec[m] += x.total();
      const double lam = eigen.lambdas(b)[m];
      r.times.push_back(t1);
      r.lambda.push_back(lam);
      r.reconstruction.push_back(rec[m]);
      r.residual_path.push_back(std::abs(lam - rec[m]));
      r.sup_residual = std::max(r.sup_residual, r.residual_path.back());
      r.terms.push_back(x);
      if (first && r.initial_bridge) r.anchor = 1;
    }
  }
  return reps;
}

ReconstructionReport reconstruct(const EigenPath& eigen, const SamplePath& path, const LevyTriplet& triplet,
                                 Eigen::Index m, const ReconstructOptions& opt) {
  if (m < 0 || m >= path.dim()) throw DimensionError("reconstruct: eigenvalue index out of range");
  auto all = reconstruct_all(eigen, path, triplet, opt);
  return std::move(all[static_cast<std::size_t>(m)]);
}

MartingaleBVSplit martingale_bv_split(const ReconstructionReport& report) {
  MartingaleBVSplit s;
  s.anchor = report.anchor;
  const std::size_t n = report.times.size();
  s.M_path.resize(n);
  s.V_path.resize(n);
  for (std::size_t i = 0; i <= report.anchor && i < n; ++i) {
    s.M_path[i] = report.reconstruction[i];
    s.V_path[i] = 0.0;
  }
  double m = report.reconstruction[report.anchor];
  double v = 0.0;
  for (std::size_t i = report.anchor + 1; i < n; ++i) {
    const LedgerEntry& e = report.terms[i - 1];
    const double dm = e.gaussian_part + e.bridge + e.jump_stochastic + e.jump_correction - e.compensator;
    const double dv = (e.stochastic_integral - e.jump_stochastic - e.gaussian_part) + e.drift_integral + e.compensator;
    m += dm;
    v += dv;
    s.M_path[i] = m;
    s.V_path[i] = v;
  }
  return s;
}

std::vector<DysonDriftRow> dyson_drift_estimate(Eigen::Index d, double sigma2, const Eigen::VectorXd& x0,
                                                double dt, int n_paths, std::uint64_t seed) {
  if (x0.size() != d) throw DimensionError("dyson_drift_estimate: x0 length differs from d");
  for (Eigen::Index i = 0; i + 1 < d; ++i)
    if (!(x0[i] > x0[i + 1])) throw ValidationError("dyson_drift_estimate: x0 must be strictly decreasing");
  if (!(dt > 0.0)) throw ValidationError("dyson_drift_estimate: dt must be positive");
  if (n_paths < 2) throw ValidationError("dyson_drift_estimate: need at least two paths");

  const auto a = CovarianceOperator::gue(d, sigma2);
  const HermitianMatrix start = HermitianMatrix::diagonal(std::span<const double>(x0.data(), static_cast<std::size_t>(d)));
  Eigen::VectorXd raw_sum = Eigen::VectorXd::Zero(d), raw_sq = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd cv_sum = Eigen::VectorXd::Zero(d), cv_sq = Eigen::VectorXd::Zero(d);
  for (int p = 0; p < n_paths; ++p) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(p), Stream::kGaussian);
    const HermitianMatrix db = gaussian_increment(a, dt, rng);
    const Eigen::VectorXd lam = eig_hermitian(start + db).lambdas;
    for (Eigen::Index m = 0; m < d; ++m) {
      const double raw = (lam[m] - x0[m]) / dt;
      const double cv = (lam[m] - x0[m] - db(m, m).real()) / dt;
      raw_sum[m] += raw;
      raw_sq[m] += raw * raw;
      cv_sum[m] += cv;
      cv_sq[m] += cv * cv;
    }
  }
  const double n = n_paths;
  std::vector<DysonDriftRow> rows;
  for (Eigen::Index m = 0; m < d; ++m) {
    DysonDriftRow r;
    r.m = m;
    double repulsion = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      if (j != m) repulsion += 1.0 / (x0[m] - x0[j]);
    r.theory = kGueDriftConstant * sigma2 * repulsion;
    r.theory_doubled = 2.0 * sigma2 * repulsion;
    r.raw_mean = raw_sum[m] / n;
    r.raw_se = std::sqrt(std::max(0.0, raw_sq[m] / n - r.raw_mean * r.raw_mean) / (n - 1));
    r.cv_mean = cv_sum[m] / n;
    r.cv_se = std::sqrt(std::max(0.0, cv_sq[m] / n - r.cv_mean * r.cv_mean) / (n - 1));
    r.z_raw = (r.raw_mean - r.theory) / r.raw_se;
    r.z_cv = (r.cv_mean - r.theory) / r.cv_se;
    r.z_cv_doubled = (r.cv_mean - r.theory_doubled) / r.cv_se;
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> refinement_residuals(const EigenPath& eigen, const SamplePath& path,
                                         const LevyTriplet& triplet, const std::vector<int>& strides) {
  std::vector<double> out;
  for (int s : strides) {
    ReconstructOptions opt;
    opt.stride = s;
    double sup = 0.0;
    for (const auto& r : reconstruct_all(eigen, path, triplet, opt)) sup = std::max(sup, r.sup_residual);
    out.push_back(sup);
  }
  return out;
}

}  // namespace hlevy
