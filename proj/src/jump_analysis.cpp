#include "hlevy/jump_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlevy/errors.hpp"

namespace hlevy {

double min_cross_gap(const Eigen::VectorXd& lambdas_pre, const Eigen::VectorXd& lambdas_post) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lambdas_post.size(); ++i)
    for (Eigen::Index j = 0; j < lambdas_pre.size(); ++j) g = std::min(g, std::abs(lambdas_post[i] - lambdas_pre[j]));
  return g;
}

Verdict check_hoffman_wielandt(const JumpRecord& rec, const Eigen::VectorXd& lambdas_pre,
                               const Eigen::VectorXd& lambdas_post) {
  Verdict v;
  v.applicable = true;
  const double lhs = (lambdas_post - lambdas_pre).norm();
  const double rhs = frobenius_norm(rec.delta);
  v.margin = rhs - lhs;
  v.pass = lhs <= rhs + 1e-10;
  return v;
}

Verdict check_disjoint_spectra(const Eigen::VectorXd& lambdas_pre, const Eigen::VectorXd& lambdas_post,
                               double gap_tol, int rank) {
  if (rank != 1) {
    throw PreconditionError("check_disjoint_spectra: jump has rank " + std::to_string(rank) + ", need 1");
  }
  Verdict v;
  v.applicable = true;
  const double g = min_cross_gap(lambdas_pre, lambdas_post);
  v.margin = g - gap_tol;
  v.pass = g > gap_tol;
  return v;
}

Verdict check_simultaneity(const JumpClassification& c, Eigen::Index d, bool absolutely_continuous) {
  if (c.rank != 1) throw PreconditionError("check_simultaneity: jump rank is " + std::to_string(c.rank) + ", need 1");
  // In d = 1 every jump commutes and the statement holds trivially.
  if (c.commutative && d > 1) throw PreconditionError("check_simultaneity: X(t) and X(t-) commute");
  if (!absolutely_continuous) throw PreconditionError("check_simultaneity: model is not absolutely continuous");
  Verdict v;
  v.applicable = true;
  v.pass = c.jumped_count == d;
  v.margin = static_cast<double>(c.jumped_count - d);
  return v;
}

namespace {

// Size of a maximum matching between two descending lists where a pair
// matches when the values differ by at most tol (greedy is optimal on a line).
int matched_pairs(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  int n = 0;
  while (i < a.size() && j < b.size()) {
    if (std::abs(a[i] - b[j]) <= tol) {
      ++n;
      ++i;
      ++j;
    } else if (a[i] > b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

}  // namespace

JumpClassification classify_jump(const JumpRecord& rec, const Eigen::VectorXd& lambdas_pre,
                                 const Eigen::VectorXd& lambdas_post, bool absolutely_continuous,
                                 const JumpTolerances& tol) {
  const Eigen::Index d = lambdas_pre.size();
  JumpClassification c;
  c.t = rec.t;
  c.commutator = rec.commutator;
  c.comm_tol = tol.comm_rel * frobenius_norm(rec.x_pre) * frobenius_norm(rec.x_post);
  c.commutative = c.commutator <= c.comm_tol;
  c.rank = rec.rank;
  const double dnorm = frobenius_norm(rec.delta);
  c.jump_tol = tol.jump_rel * dnorm;
  c.abs_delta_lambda = (lambdas_post - lambdas_pre).cwiseAbs();
  for (Eigen::Index m = 0; m < d; ++m)
    if (c.abs_delta_lambda[m] > c.jump_tol) ++c.sorted_jumped_count;
  c.jumped_count = static_cast<int>(d) - matched_pairs(lambdas_pre, lambdas_post, c.jump_tol);
  c.min_cross_gap = min_cross_gap(lambdas_pre, lambdas_post);
  c.gap_tol = tol.gap_rel * std::max(1.0, frobenius_norm(rec.x_post));

  c.hoffman_wielandt = check_hoffman_wielandt(rec, lambdas_pre, lambdas_post);
  if (c.rank == 1) {
    c.disjoint = check_disjoint_spectra(lambdas_pre, lambdas_post, c.gap_tol, c.rank);
    if (!absolutely_continuous) c.disjoint.note = "model not absolutely continuous; negative control";
  } else {
    c.disjoint.note = "rank " + std::to_string(c.rank) + " jump";
  }
  if (c.rank == 1 && (!c.commutative || d == 1) && absolutely_continuous) {
    c.simultaneity = check_simultaneity(c, d, absolutely_continuous);
  } else if (c.rank != 1) {
    c.simultaneity.note = "rank " + std::to_string(c.rank) + " jump";
  } else if (c.commutative) {
    c.simultaneity.note = "commutative jump";
  } else {
    c.simultaneity.note = "model not absolutely continuous";
  }
  return c;
}

// --- secular equation ------------------------------------------------------

namespace {

struct Pole {
  double delta;
  double w;
};

// f(base + τ) = 1 + r Σ w_i / ((δ_i − base) − τ); offsets keep the terms
// near the base pole accurate.
double secular_value(const std::vector<Pole>& poles, double r, double base, double tau) {
  double s = 0.0;
  for (const auto& p : poles) s += p.w / ((p.delta - base) - tau);
  return 1.0 + r * s;
}

// Root of f on the open interval (lo, hi) measured from `base`; f increases
// in μ when r > 0 and decreases when r < 0.
double bisect(const std::vector<Pole>& poles, double r, double base, double lo, double hi) {
  const double sgn = r > 0.0 ? 1.0 : -1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double scale = std::max({std::abs(base + mid), std::abs(mid), std::numeric_limits<double>::min()});
    if (hi - lo <= 1e-16 * scale) return mid;
    const double f = sgn * secular_value(poles, r, base, mid);
    if (f > 0.0) {
      hi = mid;
    } else if (f < 0.0) {
      lo = mid;
    } else {
      return mid;
    }
  }
  throw NumericalError("secular_rank_one_eigs: bisection did not converge in 200 iterations (bracket width " +
                           std::to_string(hi - lo) + ")",
                       hi - lo);
}

// Root between two poles δ_lo < δ_hi. Picks the nearer pole as the offset base.
double root_between(const std::vector<Pole>& poles, double r, double d_lo, double d_hi) {
  const double half = 0.5 * (d_hi - d_lo);
  const double sgn = r > 0.0 ? 1.0 : -1.0;
  const double f_mid = sgn * secular_value(poles, r, d_lo, half);
  if (f_mid > 0.0) return d_lo + bisect(poles, r, d_lo, 0.0, half);
  if (f_mid < 0.0) return d_hi + bisect(poles, r, d_hi, -half, 0.0);
  return d_lo + half;
}

}  // namespace

Eigen::VectorXd secular_rank_one_eigs(const SpectralDecomposition& a, double r, const Eigen::VectorXcd& u) {
  const Eigen::Index d = a.dim();
  if (u.size() != d) throw DimensionError("secular_rank_one_eigs: vector length differs from dimension");
  if (!a.simple) {
    const Eigen::Index i = a.min_gap_index();
    throw GapError("secular_rank_one_eigs: spectrum not simple", static_cast<int>(i), static_cast<int>(i + 1),
                   a.gaps[i]);
  }
  const double unorm = u.norm();
  if (!(unorm > 0.0)) throw PreconditionError("secular_rank_one_eigs: u must be nonzero");
  if (r == 0.0) return a.lambdas;

  std::vector<double> out;
  std::vector<Pole> poles;  // descending δ
  const Eigen::VectorXcd z = a.U.adjoint() * u;
  double wsum = 0.0;
  for (Eigen::Index m = 0; m < d; ++m) {
    if (std::abs(z[m]) <= 1e-14 * unorm) {
      out.push_back(a.lambdas[m]);
    } else {
      poles.push_back({a.lambdas[m], std::norm(z[m])});
      wsum += std::norm(z[m]);
    }
  }
  const std::size_t n = poles.size();
  if (n > 0) {
    if (r > 0.0) {
      const double top = poles[0].delta;
      out.push_back(top + bisect(poles, r, top, 0.0, r * wsum));
      for (std::size_t i = 1; i < n; ++i) out.push_back(root_between(poles, r, poles[i].delta, poles[i - 1].delta));
    } else {
      const double bot = poles[n - 1].delta;
      out.push_back(bot + bisect(poles, r, bot, r * wsum, 0.0));
      for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(root_between(poles, r, poles[i + 1].delta, poles[i].delta));
    }
  }
  std::sort(out.begin(), out.end(), std::greater<double>());
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

bool interlaces(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& mu, double r) {
  const Eigen::Index d = lambdas.size();
  if (mu.size() != d) return false;
  for (Eigen::Index m = 0; m < d; ++m) {
    if (r >= 0.0) {
      if (mu[m] < lambdas[m]) return false;
      if (m > 0 && mu[m] > lambdas[m - 1]) return false;
    } else {
      if (mu[m] > lambdas[m]) return false;
      if (m + 1 < d && mu[m] < lambdas[m + 1]) return false;
    }
  }
  return true;
}

void DeltaLambdaHistogram::add(const JumpClassification& c, double delta_norm) {
  for (Eigen::Index m = 0; m < c.abs_delta_lambda.size(); ++m) {
    const double rel = delta_norm > 0.0 ? c.abs_delta_lambda[m] / delta_norm : 0.0;
    const int key = rel > 0.0 ? static_cast<int>(std::floor(std::log10(rel))) : -99;
    if (c.abs_delta_lambda[m] > c.jump_tol) {
      ++jumped_[key];
      min_jumped_ = std::min(min_jumped_, rel);
    } else {
      ++still_[key];
      max_still_ = std::max(max_still_, rel);
    }
  }
}

}  // namespace hlevy
