#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlevy/errors.hpp"
#include "hlevy/path_synthesis.hpp"
#include "hlevy/spectral.hpp"
#include "support.hpp"

using namespace hlevy;

namespace {

LevyTriplet gue_triplet(Eigen::Index d, double s2) {
  LevyTriplet t;
  t.a = CovarianceOperator::gue(d, s2);
  t.psi = HermitianMatrix(d);
  return t;
}

LevyTriplet gue_rank_one(Eigen::Index d, double rate, RadialLaw r) {
  LevyTriplet t = gue_triplet(d, 1.0);
  t.nu = LevyMeasureSpec{d, RankOneUniform{rate, r}};
  return t;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("simulation config validation") {
  SimulationConfig c;
  CHECK_NOTHROW(c.validate());
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.steps = 10;
  c.t_max = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.t_max = 1.0;
  c.cutoff = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("pure drift path is t times the drift") {
  LevyTriplet t;
  t.a = CovarianceOperator::zero(2);
  t.psi = test::from_rows({{2.0, cplx(0.5, -1)}, {cplx(0.5, 1), 1.0}});
  SimulationConfig c;
  c.steps = 37;
  c.t_max = 2.5;
  const SamplePath p = simulate_path(t, c, 0);
  REQUIRE(p.size() == 38);
  CHECK(p.states.front().is_zero());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.states[i] == t.psi * p.time(i));
  CHECK(p.time(p.size() - 1) == 2.5);
}

TEST_CASE("gue terminal variances") {
  const LevyTriplet t = gue_triplet(2, 1.0);
  SimulationConfig c;
  c.steps = 4;
  c.t_max = 1.5;
  c.seed = 41;
  const int n = 100000;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(4), s2 = Eigen::VectorXd::Zero(4);
  for (int p = 0; p < n; ++p) {
    const Eigen::VectorXd v = vectorize(simulate_path(t, c, static_cast<std::uint64_t>(p)).states.back()).coords();
    s += v;
    s2 += v.cwiseProduct(v);
  }
  const Eigen::Vector4d expected(1.5, 1.5, 0.75, 0.75);
  for (Eigen::Index a = 0; a < 4; ++a) {
    const double var = s2[a] / n - (s[a] / n) * (s[a] / n);
    CHECK(std::abs(var - expected[a]) <= 4.0 * expected[a] * std::sqrt(2.0 / n));
  }
}

TEST_CASE("rank-one jump counts and ledger") {
  const LevyTriplet t = gue_rank_one(3, 2.0, RadialLaw::point_mass(1.0));
  SimulationConfig c;
  c.steps = 20;
  c.seed = 42;
  const int n = 10000;
  long total = 0;
  for (int p = 0; p < n; ++p) {
    const SamplePath path = simulate_path(t, c, static_cast<std::uint64_t>(p));
    total += static_cast<long>(path.jumps.size());
    for (const JumpRecord& j : path.jumps) {
      REQUIRE(j.rank == 1);
      REQUIRE((j.x_post - j.x_pre - j.delta).is_zero());
      REQUIRE(j.rank == numerical_rank(j.delta, 1e-10));
    }
  }
  CHECK(std::abs(static_cast<double>(total) / n - 2.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("path structure at jump times") {
  const LevyTriplet t = gue_rank_one(2, 5.0, RadialLaw::exponential(1.0));
  SimulationConfig c;
  c.steps = 50;
  c.seed = 43;
  const SamplePath p = simulate_path(t, c, 0);
  REQUIRE(!p.jumps.empty());
  CHECK(p.states.front().is_zero());
  for (std::size_t i = 1; i < p.size(); ++i) REQUIRE(p.time(i) > p.time(i - 1));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int j = p.points[i].jump;
    if (j < 0) continue;
    const JumpRecord& r = p.jumps[static_cast<std::size_t>(j)];
    CHECK(r.t == p.time(i));
    CHECK(p.states[i] == r.x_post);
    CHECK(pre_jump_state(p, r.t) == r.x_pre);
    // The pre-jump state carries the Gaussian increment of the split cell.
    CHECK(r.x_pre == p.left_limit(i));
    CHECK((r.x_pre - p.states[i - 1] - p.gaussian[i] - p.psi_eff * (p.time(i) - p.time(i - 1))).matrix().norm() <=
          1e-13);
  }
}

TEST_CASE("pre-jump state lookups") {
  const LevyTriplet t = gue_rank_one(2, 5.0, RadialLaw::point_mass(1.0));
  SimulationConfig c;
  c.steps = 10;
  c.seed = 44;
  const SamplePath p = simulate_path(t, c, 0);
  CHECK(pre_jump_state(p, 0.0) == p.states.front());
  CHECK(pre_jump_state(p, p.time(3)) == p.left_limit(3));
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.points[i].jump < 0) CHECK(pre_jump_state(p, p.time(i)) == p.states[i]);
  CHECK_THROWS_AS(pre_jump_state(p, 0.123456789), PreconditionError);
}

TEST_CASE("reproducibility is bit-exact") {
  const LevyTriplet t = gue_rank_one(3, 3.0, RadialLaw::exponential(2.0));
  SimulationConfig c;
  c.steps = 30;
  c.seed = 45;
  const SamplePath a = simulate_path(t, c, 7), b = simulate_path(t, c, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.time(i) == b.time(i));
    CHECK(a.states[i] == b.states[i]);
  }
  const SamplePath other = simulate_path(t, c, 8);
  CHECK_FALSE(other.states.back() == a.states.back());
}

TEST_CASE("telescoping increments") {
  const LevyTriplet t = gue_rank_one(3, 4.0, RadialLaw::exponential(1.0));
  SimulationConfig c;
  c.steps = 64;
  c.seed = 46;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const SamplePath p = simulate_path(t, c, k);
    HermitianMatrix sum = p.psi_eff * c.t_max;
    for (const auto& g : p.gaussian) sum += g;
    for (const auto& j : p.jumps) sum += j.delta;
    CHECK((sum - p.states.back()).matrix().norm() <= 1e-12 * std::max(1.0, frobenius_norm(p.states.back())));
  }
}

TEST_CASE("refining the grid leaves the jump ledger unchanged") {
  const LevyTriplet t = gue_rank_one(2, 4.0, RadialLaw::stable_truncated(0.7, 0.0, 2.0));
  SimulationConfig c;
  c.steps = 50;
  c.seed = 47;
  SimulationConfig fine = c;
  fine.steps = 100;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const SamplePath a = simulate_path(t, c, k), b = simulate_path(t, fine, k);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t j = 0; j < a.jumps.size(); ++j) {
      CHECK(a.jumps[j].t == b.jumps[j].t);
      // The recorded delta is post − pre of the simulated states, so it can
      // differ from the sampled jump by rounding of the surrounding state.
      const double tol = 4e-16 * (frobenius_norm(a.jumps[j].x_pre) + frobenius_norm(a.jumps[j].delta));
      CHECK((a.jumps[j].delta - b.jumps[j].delta).matrix().cwiseAbs().maxCoeff() <= tol);
    }
  }
}

TEST_CASE("the sampled jump stream does not depend on the grid") {
  const LevyTriplet t = gue_rank_one(2, 4.0, RadialLaw::stable_truncated(0.7, 0.0, 2.0));
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng a = make_rng(47, k, Stream::kJumps), b = make_rng(47, k, Stream::kJumps);
    const auto ja = sample_jumps(*t.nu, 0.0, 1.0, 1e-3, a), jb = sample_jumps(*t.nu, 0.0, 1.0, 1e-3, b);
    REQUIRE(ja.size() == jb.size());
    for (std::size_t j = 0; j < ja.size(); ++j) CHECK(ja[j].delta == jb[j].delta);
  }
}

TEST_CASE("entrywise Dyson construction") {
  SimulationConfig c;
  c.steps = 8;
  c.seed = 48;
  SUBCASE("matches the covariance construction in law") {
    const LevyTriplet t = gue_triplet(2, 1.0);
    std::vector<double> a, b;
    SimulationConfig c2 = c;
    c2.seed = 49;
    for (int p = 0; p < 10000; ++p) {
      const auto la = eig_hermitian(simulate_dyson_entrywise(2, 1.0, c, static_cast<std::uint64_t>(p)).states.back()).lambdas;
      const auto lb = eig_hermitian(simulate_path(t, c2, static_cast<std::uint64_t>(p)).states.back()).lambdas;
      a.push_back(la[0] - la[1]);
      b.push_back(lb[0] - lb[1]);
    }
    // 1% critical value of the two-sample statistic, n = m = 10⁴.
    CHECK(ks_statistic(a, b) < 1.628 * std::sqrt(2.0 / 10000));
  }
  SUBCASE("zero variance gives the zero path") {
    const SamplePath p = simulate_dyson_entrywise(3, 0.0, c, 0);
    for (const auto& x : p.states) CHECK(x.is_zero());
  }
  SUBCASE("d = 1 is a Brownian motion with variance sigma2 t") {
    const int n = 20000;
    double s2 = 0.0;
    for (int p = 0; p < n; ++p) {
      const double v = simulate_dyson_entrywise(1, 2.0, c, static_cast<std::uint64_t>(p)).states.back()(0, 0).real();
      s2 += v * v;
    }
    CHECK(std::abs(s2 / n - 2.0) <= 4.0 * 2.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("jump times landing on a grid node are merged") {
  // A compound Poisson path whose only possible jumps sit in continuous time
  // never coincides with the grid; check the merged grid is still complete.
  const LevyTriplet t = gue_rank_one(2, 10.0, RadialLaw::point_mass(1.0));
  SimulationConfig c;
  c.steps = 16;
  c.seed = 50;
  const SamplePath p = simulate_path(t, c, 0);
  int grid = 0;
  for (const auto& pt : p.points) grid += pt.grid >= 0;
  CHECK(grid == 17);
  CHECK(p.size() == 17 + p.jumps.size());
}

TEST_CASE("make_jump_record fields") {
  Rng rng = make_rng(51, 0, Stream::kAuxiliary);
  const HermitianMatrix a = test::random_hermitian(3, rng), b = test::random_hermitian(3, rng);
  const JumpRecord r = make_jump_record(0.5, a, b);
  CHECK(r.delta == b - a);
  CHECK(r.rank == 3);
  CHECK(r.commutator == doctest::Approx(commutator_norm(b, a)));
  CHECK((r.delta_lambda - (eig_hermitian(b).lambdas - eig_hermitian(a).lambdas)).norm() == 0.0);
}
