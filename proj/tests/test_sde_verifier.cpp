#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlevy/errors.hpp"
#include "hlevy/hadamard.hpp"
#include "hlevy/path_synthesis.hpp"
#include "hlevy/sde_verifier.hpp"
#include "hlevy/spectral_tracking.hpp"

using namespace hlevy;

namespace {

LevyTriplet gue(Eigen::Index d) {
  LevyTriplet t;
  t.a = CovarianceOperator::gue(d, 1.0);
  t.psi = HermitianMatrix(d);
  return t;
}

LevyTriplet gue_jumps(Eigen::Index d, bool symmetric = false) {
  LevyTriplet t = gue(d);
  t.nu = LevyMeasureSpec{d, RankOneUniform{3.0, RadialLaw::exponential(1.0, symmetric)}};
  return t;
}

LevyTriplet pure_jump(Eigen::Index d) {
  LevyTriplet t;
  t.a = CovarianceOperator::zero(d);
  t.psi = HermitianMatrix(d);
  t.nu = LevyMeasureSpec{d, RankOneUniform{4.0, RadialLaw::point_mass(1.5, true)}};
  return t;
}

double max_sup(const std::vector<ReconstructionReport>& reps) {
  double s = 0.0;
  for (const auto& r : reps) s = std::max(s, r.sup_residual);
  return s;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  Moments m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.se = std::sqrt(ss / (n - 1) / n);
  return m;
}

}  // namespace

TEST_CASE("pure drift is reconstructed exactly") {
  LevyTriplet t;
  t.a = CovarianceOperator::zero(2);
  const std::vector<double> dg{2, 1};
  t.psi = HermitianMatrix::diagonal(dg);
  SimulationConfig c;
  c.steps = 50;
  const SamplePath p = simulate_path(t, c, 0);
  const EigenPath e = eigen_path(p);
  for (Eigen::Index m = 0; m < 2; ++m) {
    const ReconstructionReport r = reconstruct(e, p, t, m);
    CHECK(r.reconstruction.front() == e.lambdas(0)[m]);
    CHECK(r.sup_residual <= 1e-12);
    CHECK(r.times.size() == p.size());
    CHECK(r.terms.size() + 1 == r.times.size());
    // Ψ is diagonal, so the path never leaves the eigenbasis.
    for (const auto& x : r.terms) CHECK(x.jump_correction == 0.0);
  }
}

TEST_CASE("pure-jump paths telescope exactly") {
  SimulationConfig c;
  c.steps = 100;
  c.t_max = 2.0;
  c.seed = 71;
  int jumps = 0;
  for (Eigen::Index d : {2, 3, 4}) {
    const LevyTriplet t = pure_jump(d);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const SamplePath p = simulate_path(t, c, k);
      jumps += static_cast<int>(p.jumps.size());
      const auto reps = reconstruct_all(eigen_path(p), p, t);
      const double scale = std::max(1.0, frobenius_norm(p.states.back()));
      CHECK(max_sup(reps) <= 1e-10 * scale);
    }
  }
  CHECK(jumps > 100);
}

TEST_CASE("ledger sums telescope to the reconstruction") {
  SimulationConfig c;
  c.steps = 200;
  c.seed = 72;
  const LevyTriplet t = gue_jumps(3);
  const SamplePath p = simulate_path(t, c, 0);
  const EigenPath e = eigen_path(p);
  for (int stride : {1, 4}) {
    ReconstructOptions o;
    o.stride = stride;
    for (const auto& r : reconstruct_all(e, p, t, o)) {
      double acc = r.reconstruction.front();
      for (std::size_t k = 0; k < r.terms.size(); ++k) {
        acc += r.terms[k].total();
        CHECK(std::abs(acc - r.reconstruction[k + 1]) <= 1e-13);
        CHECK(std::abs(r.residual_path[k + 1] - std::abs(r.lambda[k + 1] - r.reconstruction[k + 1])) == 0.0);
      }
      CHECK(r.initial_bridge);
      CHECK(r.anchor == 1);
    }
  }
}

TEST_CASE("jump terms come from the exact ledger") {
  SimulationConfig c;
  c.steps = 100;
  c.seed = 73;
  const LevyTriplet t = gue_jumps(3);
  const SamplePath p = simulate_path(t, c, 0);
  REQUIRE(!p.jumps.empty());
  const EigenPath e = eigen_path(p);
  const auto reps = reconstruct_all(e, p, t);
  std::size_t seen = 0;
  for (std::size_t k = 0; k < reps[0].terms.size(); ++k) {
    if (!reps[0].terms[k].has_jump) continue;
    const JumpRecord& jr = p.jumps[seen++];
    CHECK(reps[0].terms[k].t1 == jr.t);
    const Eigen::VectorXd dl = eig_hermitian(jr.x_post).lambdas - eig_hermitian(jr.x_pre).lambdas;
    for (Eigen::Index m = 0; m < 3; ++m) {
      const auto& x = reps[static_cast<std::size_t>(m)].terms[k];
      CHECK(std::abs(x.jump_stochastic + x.jump_correction - dl[m]) <= 1e-12);
    }
  }
  CHECK(seen == p.jumps.size());
}

TEST_CASE("sum rule: eigenvalue reconstructions add up to the trace") {
  SimulationConfig c;
  c.steps = 200;
  c.seed = 74;
  for (Eigen::Index d : {2, 3, 5}) {
    const LevyTriplet t = gue_jumps(d);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const SamplePath p = simulate_path(t, c, k);
      const auto reps = reconstruct_all(eigen_path(p), p, t);
      REQUIRE(reps[0].times.size() == p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        double s = 0.0;
        for (const auto& r : reps) s += r.reconstruction[i];
        CHECK(std::abs(s - p.states[i].matrix().trace().real()) <= 1e-10);
      }
    }
  }
}

TEST_CASE("refinement: residual shrinks when the grid doubles") {
  // N = 200 against 2N = 400 on the same Brownian path.
  SimulationConfig c;
  c.t_max = 0.5;
  c.steps = 400;
  c.seed = 75;
  const LevyTriplet t = gue(2);
  std::vector<double> ratios;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const SamplePath p = simulate_path(t, c, k);
    const auto r = refinement_residuals(eigen_path(p), p, t, {2, 1});
    ratios.push_back(r[0] / r[1]);
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / 100.0;
  MESSAGE("mean ratio N/2N = " << mean);
  CHECK(mean >= 1.3);
}

TEST_CASE("refinement: median residual decreases for the jump model") {
  SimulationConfig c;
  c.steps = 800;
  c.seed = 76;
  const LevyTriplet t = gue_jumps(3);
  const std::vector<int> strides{8, 4, 2, 1};
  std::vector<std::vector<double>> cols(strides.size());
  for (std::uint64_t k = 0; k < 100; ++k) {
    const SamplePath p = simulate_path(t, c, k);
    const auto r = refinement_residuals(eigen_path(p), p, t, strides);
    for (std::size_t s = 0; s < strides.size(); ++s) cols[s].push_back(r[s]);
  }
  std::vector<double> med;
  for (auto& col : cols) {
    std::nth_element(col.begin(), col.begin() + 50, col.end());
    med.push_back(col[50]);
  }
  for (std::size_t s = 1; s < med.size(); ++s) CHECK(med[s] < med[s - 1]);
}

TEST_CASE("martingale and bounded-variation parts add up") {
  SimulationConfig c;
  c.steps = 100;
  c.seed = 77;
  const LevyTriplet t = gue_jumps(3);
  const SamplePath p = simulate_path(t, c, 0);
  ReconstructOptions o;
  o.compensator_draws = 16;
  o.seed = 77;
  for (const auto& r : reconstruct_all(eigen_path(p), p, t, o)) {
    const MartingaleBVSplit s = martingale_bv_split(r);
    REQUIRE(s.M_path.size() == r.reconstruction.size());
    for (std::size_t i = 0; i < s.M_path.size(); ++i)
      CHECK(std::abs(s.M_path[i] + s.V_path[i] - r.reconstruction[i]) <= 1e-12);
    CHECK(s.anchor == r.anchor);
  }
}

TEST_CASE("zero triplet gives zero martingale and zero variation") {
  SimulationConfig c;
  c.steps = 30;
  // σ² = 0 gives the zero path without a validated triplet.
  const SamplePath p = simulate_dyson_entrywise(3, 0.0, c, 0);
  LevyTriplet t;
  t.a = CovarianceOperator::zero(3);
  t.psi = HermitianMatrix(3);
  for (const auto& r : reconstruct_all(eigen_path(p), p, t)) {
    const MartingaleBVSplit s = martingale_bv_split(r);
    for (std::size_t i = 0; i < s.M_path.size(); ++i) {
      CHECK(s.M_path[i] == 0.0);
      CHECK(s.V_path[i] == 0.0);
    }
    CHECK(r.grid_exclusions == 0);
  }
}

TEST_CASE("symmetric jumps with zero drift: V is the repulsion drift plus the compensator") {
  SimulationConfig c;
  c.steps = 100;
  c.seed = 78;
  const LevyTriplet t = gue_jumps(2, true);
  const SamplePath p = simulate_path(t, c, 0);
  // A symmetric law has no compensating drift to integrate.
  CHECK(p.psi_eff.is_zero());
  ReconstructOptions o;
  o.compensator_draws = 8;
  for (const auto& r : reconstruct_all(eigen_path(p), p, t, o)) {
    const MartingaleBVSplit s = martingale_bv_split(r);
    double v = 0.0;
    for (std::size_t i = s.anchor + 1; i < s.V_path.size(); ++i) {
      const auto& x = r.terms[i - 1];
      v += x.drift_integral + x.compensator;
      CHECK(std::abs(s.V_path[i] - v) <= 1e-12);
    }
  }
}

TEST_CASE("martingale increments have mean zero") {
  SimulationConfig c;
  c.steps = 40;
  c.t_max = 1.0;

  SUBCASE("gue") {
    c.seed = 79;
    const LevyTriplet t = gue(2);
    std::vector<double> inc;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      const SamplePath p = simulate_path(t, c, k);
      inc.push_back(martingale_bv_split(reconstruct(eigen_path(p), p, t, 0)).martingale_increment());
    }
    const Moments m = moments(inc);
    CHECK(std::abs(m.mean) <= 4.0 * m.se);
  }
  SUBCASE("gue with rank-one jumps") {
    c.seed = 80;
    const LevyTriplet t = gue_jumps(2);
    std::vector<double> inc;
    ReconstructOptions o;
    o.compensator_draws = 8;
    o.seed = 80;
    for (std::uint64_t k = 0; k < 2000; ++k) {
      const SamplePath p = simulate_path(t, c, k);
      o.path_index = k;
      inc.push_back(martingale_bv_split(reconstruct(eigen_path(p), p, t, 0, o)).martingale_increment());
    }
    const Moments m = moments(inc);
    CHECK(std::abs(m.mean) <= 4.0 * m.se);
  }
}

TEST_CASE("Dyson drift estimator") {
  SUBCASE("unit gap agrees with the implemented constant") {
    Eigen::VectorXd x0(2);
    x0 << 1.0, -1.0;
    const auto rows = dyson_drift_estimate(2, 1.0, x0, 1e-4, 20000, 81);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].theory == doctest::Approx(0.5 * kGueDriftConstant));
    CHECK(rows[1].theory == doctest::Approx(-0.5 * kGueDriftConstant));
    CHECK(rows[0].theory_doubled == doctest::Approx(1.0));
    for (const auto& r : rows) {
      CHECK(std::abs(r.z_raw) <= 3.0);
      CHECK(std::abs(r.z_cv) <= 3.0);
      CHECK(r.cv_se < r.raw_se);
    }
  }
  SUBCASE("symmetric start gives opposite estimates") {
    Eigen::VectorXd x0(2);
    x0 << 0.5, -0.5;
    const auto rows = dyson_drift_estimate(2, 1.0, x0, 1e-4, 5000, 82);
    // λ₁ + λ₂ = tr, and the trace increment is removed by the control variate.
    CHECK(std::abs(rows[0].cv_mean + rows[1].cv_mean) <= 1e-6);
    CHECK(std::abs(rows[0].raw_mean + rows[1].raw_mean) <= 4.0 * std::hypot(rows[0].raw_se, rows[1].raw_se));
  }
  SUBCASE("drift scales with the inverse gap") {
    Eigen::VectorXd x0(2);
    x0 << 100.0, -100.0;
    const auto rows = dyson_drift_estimate(2, 1.0, x0, 1e-4, 5000, 83);
    CHECK(rows[0].theory == doctest::Approx(0.005 * kGueDriftConstant));
    CHECK(std::abs(rows[0].cv_mean - 0.005 * kGueDriftConstant) <= 4.0 * rows[0].cv_se);
    CHECK(std::abs(rows[0].cv_mean) < 0.01);
  }
  SUBCASE("three levels") {
    Eigen::VectorXd x0(3);
    x0 << 2.0, 0.0, -1.0;
    const auto rows = dyson_drift_estimate(3, 1.0, x0, 1e-4, 20000, 84);
    CHECK(rows[1].theory == doctest::Approx(kGueDriftConstant * (-0.5 + 1.0)));
    // Three simultaneous rows, so the band is one SE wider.
    for (const auto& r : rows) CHECK(std::abs(r.z_cv) <= 4.0);
  }
  SUBCASE("preconditions") {
    Eigen::VectorXd x0(2);
    x0 << -1.0, 1.0;
    CHECK_THROWS_AS(dyson_drift_estimate(2, 1.0, x0, 1e-4, 10, 0), ValidationError);
    x0 << 1.0, -1.0;
    CHECK_THROWS_AS(dyson_drift_estimate(2, 1.0, x0, 0.0, 10, 0), ValidationError);
    CHECK_THROWS_AS(dyson_drift_estimate(2, 1.0, x0, 1e-4, 1, 0), ValidationError);
    CHECK_THROWS_AS(dyson_drift_estimate(3, 1.0, x0, 1e-4, 10, 0), DimensionError);
  }
}

TEST_CASE("exclusion accounting") {
  SimulationConfig c;
  c.steps = 100;
  c.seed = 85;
  SUBCASE("a generic path bridges only the start") {
    const LevyTriplet t = gue_jumps(3);
    const SamplePath p = simulate_path(t, c, 0);
    for (const auto& r : reconstruct_all(eigen_path(p), p, t)) {
      CHECK(r.grid_exclusions == 0);
      CHECK(r.valid());
      CHECK(r.terms.front().bridge != 0.0);
      CHECK_FALSE(r.terms.front().excluded);
    }
  }
  SUBCASE("a drift proportional to the identity keeps the spectrum degenerate") {
    LevyTriplet t;
    t.a = CovarianceOperator::zero(2);
    t.psi = HermitianMatrix::identity(2);
    const SamplePath p = simulate_path(t, c, 0);
    const auto r = reconstruct(eigen_path(p), p, t, 0);
    CHECK(r.grid_exclusions == c.steps - 1);
    CHECK(r.exclusion_fraction() > 1e-3);
    CHECK_FALSE(r.valid());
    // Bridges are exact, so the reconstruction itself still matches.
    CHECK(r.sup_residual <= 1e-12);
  }
}

TEST_CASE("reconstruction preconditions") {
  SimulationConfig c;
  c.steps = 20;
  const LevyTriplet t = gue(2);
  const SamplePath p = simulate_path(t, c, 0);
  const EigenPath e = eigen_path(p);
  ReconstructOptions o;
  o.stride = 0;
  CHECK_THROWS_AS(reconstruct_all(e, p, t, o), PreconditionError);
  CHECK_THROWS_AS(reconstruct_all(e, p, gue(3)), DimensionError);
  CHECK_THROWS_AS(reconstruct(e, p, t, 2), DimensionError);
  SamplePath shorter = p;
  shorter.points.pop_back();
  shorter.states.pop_back();
  shorter.gaussian.pop_back();
  CHECK_THROWS_AS(reconstruct_all(e, shorter, t), PreconditionError);
}
