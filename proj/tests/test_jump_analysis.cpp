#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hlevy/errors.hpp"
#include "hlevy/jump_analysis.hpp"
#include "hlevy/path_synthesis.hpp"
#include "support.hpp"

using namespace hlevy;

namespace {

JumpClassification classify(const JumpRecord& r, bool abs_cont) {
  return classify_jump(r, eig_hermitian(r.x_pre).lambdas, eig_hermitian(r.x_post).lambdas, abs_cont);
}

LevyTriplet with_jumps(Eigen::Index d, LevyMeasureSpec::Family f, bool gaussian) {
  LevyTriplet t;
  t.a = gaussian ? CovarianceOperator::gue(d, 1.0) : CovarianceOperator::zero(d);
  t.nu = LevyMeasureSpec{d, std::move(f)};
  t.psi = HermitianMatrix(d);
  return t;
}

}  // namespace

TEST_CASE("commutative rank-one jump moves one eigenvalue") {
  const std::vector<double> pre{3, 1}, dl{0, 0.5};
  const JumpRecord r = make_jump_record(0.5, HermitianMatrix::diagonal(pre),
                                        HermitianMatrix::diagonal(pre) + HermitianMatrix::diagonal(dl));
  const JumpClassification c = classify(r, false);
  CHECK(c.commutative);
  CHECK(c.rank == 1);
  CHECK(c.jumped_count == 1);
  CHECK(c.hoffman_wielandt.pass);
  CHECK_FALSE(c.simultaneity.applicable);
}

TEST_CASE("a jump reordering the spectrum is counted through the common frame") {
  // diag(3, 1) -> diag(3, 4): sorted pairing sees two moves, the frame pairing one.
  const std::vector<double> pre{3, 1}, dl{0, 3};
  const JumpRecord r = make_jump_record(0.5, HermitianMatrix::diagonal(pre),
                                        HermitianMatrix::diagonal(pre) + HermitianMatrix::diagonal(dl));
  const JumpClassification c = classify(r, false);
  CHECK(c.jumped_count == 1);
  CHECK(c.sorted_jumped_count == 2);
}

TEST_CASE("scalar jump shifts the whole spectrum") {
  Rng rng = make_rng(71, 0, Stream::kAuxiliary);
  for (Eigen::Index d : {1, 2, 4, 6}) {
    const HermitianMatrix x = test::random_hermitian(d, rng);
    const double c0 = -0.7;
    const JumpRecord r = make_jump_record(0.1, x, x + HermitianMatrix::identity(d) * c0);
    const JumpClassification c = classify(r, true);
    CHECK(c.commutative);
    CHECK(c.rank == d);
    CHECK(c.jumped_count == d);
    for (Eigen::Index m = 0; m < d; ++m) CHECK(r.delta_lambda[m] == doctest::Approx(c0).epsilon(1e-12));
    // Equality case of the bound.
    CHECK(std::abs(c.hoffman_wielandt.margin) <= 1e-12);
    CHECK(c.hoffman_wielandt.pass);
  }
}

TEST_CASE("Hoffman-Wielandt verdicts") {
  Rng rng = make_rng(72, 0, Stream::kAuxiliary);
  const HermitianMatrix x = test::random_hermitian(3, rng);
  const JumpRecord zero = make_jump_record(0.2, x, x);
  const Verdict v = check_hoffman_wielandt(zero, eig_hermitian(x).lambdas, eig_hermitian(x).lambdas);
  CHECK(v.pass);
  CHECK(v.margin == 0.0);

  // A deliberately wrong eigenvalue vector fails.
  const HermitianMatrix y = x + test::random_hermitian(3, rng) * 0.1;
  const JumpRecord r = make_jump_record(0.2, x, y);
  Eigen::VectorXd wrong = eig_hermitian(y).lambdas;
  wrong[0] += 10.0;
  CHECK_FALSE(check_hoffman_wielandt(r, eig_hermitian(x).lambdas, wrong).pass);
}

TEST_CASE("noncommutative rank-one jump under a Gaussian model moves every eigenvalue") {
  const LevyTriplet t = with_jumps(4, RankOneUniform{5.0, RadialLaw::exponential(1.0)}, true);
  SimulationConfig c;
  c.steps = 20;
  c.seed = 73;
  int seen = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    for (const JumpRecord& r : simulate_path(t, c, k).jumps) {
      const JumpClassification cl = classify(r, true);
      CHECK_FALSE(cl.commutative);
      CHECK(cl.rank == 1);
      CHECK(cl.jumped_count == 4);
      CHECK(cl.simultaneity.applicable);
      CHECK(cl.simultaneity.pass);
      CHECK(cl.disjoint.pass);
      ++seen;
    }
  }
  CHECK(seen > 50);
}

TEST_CASE("disjoint spectra") {
  SUBCASE("Gaussian plus rank-one jumps: no shared eigenvalues") {
    DeltaLambdaHistogram hist;
    for (Eigen::Index d : {2, 3, 4}) {
      const LevyTriplet t = with_jumps(d, RankOneUniform{4.0, RadialLaw::exponential(1.0)}, true);
      SimulationConfig c;
      c.steps = 10;
      c.seed = 74;
      int n = 0;
      for (std::uint64_t k = 0; n < 1000; ++k) {
        for (const JumpRecord& r : simulate_path(t, c, k).jumps) {
          const JumpClassification cl = classify(r, true);
          REQUIRE(cl.disjoint.applicable);
          REQUIRE(cl.disjoint.pass);
          REQUIRE(cl.min_cross_gap > 1e-8 * std::max(1.0, frobenius_norm(r.x_post)));
          hist.add(cl, frobenius_norm(r.delta));
          ++n;
        }
      }
    }
    // The jump tolerance separates moved from unmoved eigenvalues.
    CHECK(hist.still().empty());
    CHECK(hist.min_jumped() > 1e-6);
  }
  SUBCASE("commutative control shares d - 1 eigenvalues") {
    const std::vector<double> pre{3, 2, 1}, dl{0, 0.5, 0};
    const Eigen::VectorXd a = eig_hermitian(HermitianMatrix::diagonal(pre)).lambdas;
    const Eigen::VectorXd b = eig_hermitian(HermitianMatrix::diagonal(pre) + HermitianMatrix::diagonal(dl)).lambdas;
    const Verdict v = check_disjoint_spectra(a, b, 1e-8, 1);
    CHECK_FALSE(v.pass);
    CHECK(min_cross_gap(a, b) == 0.0);
  }
  SUBCASE("one dimension") {
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 1.0), b = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(min_cross_gap(a, b) == 1.0);
    CHECK(check_disjoint_spectra(a, b, 1e-8, 1).pass);
  }
  SUBCASE("rank other than one is a precondition error") {
    const Eigen::VectorXd a = Eigen::VectorXd::Zero(2), b = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(check_disjoint_spectra(a, b, 1e-8, 2), PreconditionError);
  }
}

TEST_CASE("simultaneity preconditions") {
  JumpClassification c;
  c.rank = 1;
  c.commutative = true;
  c.jumped_count = 1;
  CHECK_THROWS_AS(check_simultaneity(c, 3, true), PreconditionError);
  c.commutative = false;
  CHECK_THROWS_AS(check_simultaneity(c, 3, false), PreconditionError);
  c.rank = 2;
  CHECK_THROWS_AS(check_simultaneity(c, 3, true), PreconditionError);
  c.rank = 1;
  CHECK_FALSE(check_simultaneity(c, 3, true).pass);

  // d = 1: jumped_count = 1 = d.
  const JumpRecord r = make_jump_record(0.3, HermitianMatrix::identity(1), HermitianMatrix::identity(1) * 2.0);
  const JumpClassification one = classify(r, true);
  CHECK(one.simultaneity.applicable);
  CHECK(one.simultaneity.pass);
}

TEST_CASE("commutative full-rank model: jumped count equals jump rank") {
  Rng aux = make_rng(75, 0, Stream::kAuxiliary);
  for (Eigen::Index d : {2, 3, 5}) {
    FullRankSampler s;
    s.kind = FullRankSampler::Kind::kFrameDiagonal;
    s.scale = 1.0;
    s.frame = test::random_unitary(d, aux);
    const LevyTriplet t = with_jumps(d, FullRankCompoundPoisson{5.0, s}, false);
    SimulationConfig c;
    c.steps = 10;
    c.seed = 75;
    int n = 0;
    for (std::uint64_t k = 0; k < 40; ++k) {
      for (const JumpRecord& r : simulate_path(t, c, k).jumps) {
        const JumpClassification cl = classify(r, false);
        REQUIRE(cl.commutative);
        REQUIRE(cl.rank == d);
        REQUIRE(cl.jumped_count == cl.rank);
        ++n;
      }
    }
    CHECK(n > 100);
  }
}

TEST_CASE("Hoffman-Wielandt never fails on simulated jumps of any family") {
  Rng aux = make_rng(76, 0, Stream::kAuxiliary);
  const Eigen::Index d = 3;
  FullRankSampler g;
  g.kind = FullRankSampler::Kind::kGue;
  g.c = 0.0;
  DiagonalIndependent di;
  di.coordinates = {{2.0, RadialLaw::exponential(1.0)}, {1.0, RadialLaw::point_mass(0.5, true)},
                    {1.0, RadialLaw::stable_truncated(1.0, 0.0, 2.0)}};
  di.frame = test::random_unitary(d, aux);
  const std::vector<LevyMeasureSpec::Family> families{
      RankOneUniform{5.0, RadialLaw::stable_truncated(0.5, 0.0, 3.0)}, di, FullRankCompoundPoisson{5.0, g},
      QvVectorLevy{{5.0, RadialLaw::exponential(2.0)}},
      QvDifference{{3.0, RadialLaw::point_mass(1.0)}, {3.0, RadialLaw::exponential(1.0)}}};
  long total = 0, failures = 0;
  for (const auto& f : families) {
    for (bool gaussian : {false, true}) {
      const LevyTriplet t = with_jumps(d, f, gaussian);
      SimulationConfig c;
      c.steps = 5;
      c.seed = 76;
      for (std::uint64_t k = 0; k < 200; ++k) {
        for (const JumpRecord& r : simulate_path(t, c, k).jumps) {
          failures += !classify(r, gaussian).hoffman_wielandt.pass;
          ++total;
        }
      }
    }
  }
  CHECK(total > 5000);
  CHECK(failures == 0);
}

TEST_CASE("secular solver") {
  SUBCASE("two by two closed form") {
    const std::vector<double> a{2, 0};
    const SpectralDecomposition s = eig_hermitian(HermitianMatrix::diagonal(a));
    Eigen::VectorXcd u(2);
    u << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Eigen::VectorXd mu = secular_rank_one_eigs(s, 2.0, u);
    CHECK(mu[0] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(mu[1] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("u along an eigenvector shifts that eigenvalue only") {
    Rng rng = make_rng(77, 0, Stream::kAuxiliary);
    const HermitianMatrix x = test::random_hermitian(5, rng);
    const SpectralDecomposition s = eig_hermitian(x);
    for (Eigen::Index m = 0; m < 5; ++m) {
      const double r = 0.37;
      Eigen::VectorXd expected = s.lambdas;
      expected[m] += r;
      std::sort(expected.data(), expected.data() + 5, std::greater<>());
      const Eigen::VectorXd mu = secular_rank_one_eigs(s, r, s.U.col(m) * std::polar(2.0, 0.4));
      // |u|² = 4 scales the shift.
      Eigen::VectorXd exp4 = s.lambdas;
      exp4[m] += 4.0 * r;
      std::sort(exp4.data(), exp4.data() + 5, std::greater<>());
      CHECK((mu - exp4).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("matches dense solvers on random instances and interlaces") {
    Rng rng = make_rng(78, 0, Stream::kAuxiliary);
    for (int k = 0; k < 1000; ++k) {
      const Eigen::Index d = 1 + k % 8;
      const HermitianMatrix a = test::random_hermitian(d, rng);
      Eigen::VectorXcd u(d);
      for (Eigen::Index i = 0; i < d; ++i) u[i] = cplx(standard_normal(rng), standard_normal(rng));
      const double r = (k % 2 ? 1.0 : -1.0) * (0.05 + 3.0 * uniform01(rng));
      const SpectralDecomposition s = eig_hermitian(a);
      const Eigen::VectorXd mu = secular_rank_one_eigs(s, r, u);
      const HermitianMatrix b = a + HermitianMatrix::outer(u, r);
      REQUIRE((mu - eig_hermitian(b).lambdas).cwiseAbs().maxCoeff() <= 1e-10);
      REQUIRE((mu - test::oracle_eigenvalues(b)).cwiseAbs().maxCoeff() <= 1e-10);
      REQUIRE(interlaces(s.lambdas, mu, r));
    }
  }
  SUBCASE("non-simple input is rejected") {
    const SpectralDecomposition s = eig_hermitian(HermitianMatrix::identity(3));
    CHECK_THROWS_AS(secular_rank_one_eigs(s, 1.0, Eigen::VectorXcd::Ones(3)), GapError);
  }
}

TEST_CASE("interlacing detects violations") {
  const Eigen::Vector3d l(3, 2, 1);
  CHECK(interlaces(l, Eigen::Vector3d(3.5, 2.5, 1.5), 1.0));
  CHECK_FALSE(interlaces(l, Eigen::Vector3d(3.5, 3.2, 1.5), 1.0));
  CHECK(interlaces(l, Eigen::Vector3d(2.5, 1.5, 0.5), -1.0));
  CHECK_FALSE(interlaces(l, Eigen::Vector3d(3.5, 1.5, 0.5), -1.0));
}

TEST_CASE("delta-lambda histogram keys") {
  DeltaLambdaHistogram h;
  JumpClassification c;
  c.abs_delta_lambda = Eigen::Vector3d(0.5, 1e-9, 0.0);
  c.jump_tol = 1e-6;
  h.add(c, 1.0);
  CHECK(h.jumped().at(-1) == 1);
  CHECK(h.still().at(-9) == 1);
  CHECK(h.still().at(-99) == 1);
  CHECK(h.min_jumped() == 0.5);
  CHECK(h.max_still() == doctest::Approx(1e-9));
}
