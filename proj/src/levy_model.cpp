#include "hlevy/levy_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hlevy/errors.hpp"
#include "hlevy/spectral.hpp"

namespace hlevy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficients w with Θ = Σ_a w_a Θ_a in the dual basis.
Eigen::VectorXd dual_weights(const HermitianMatrix& theta) {
  const Eigen::Index d = theta.dim();
  Eigen::VectorXd w(d * d);
  for (Eigen::Index k = 0; k < d; ++k) w[k] = theta(k, k).real();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index h = k + 1; h < d; ++h) {
      const Eigen::Index a = offdiag_coordinate(d, k, h);
      w[a] = 2.0 * theta(k, h).real();
      w[a + 1] = 2.0 * theta(k, h).imag();
    }
  }
  return w;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.rows();
  if (c.isZero(0.0)) return Eigen::MatrixXd::Zero(n, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.eigenvalues()[i] > 1e-14 * top) keep.push_back(i);
  }
  Eigen::MatrixXd l(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const Eigen::Index i = keep[j];
    l.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(i) * std::sqrt(es.eigenvalues()[i]);
  }
  return l;
}

void require_psd(const HermitianMatrix& s, const char* name) {
  const auto dec = eig_hermitian(s);
  const double tol = 1e-12 * std::max(1.0, frobenius_norm(s));
  if (dec.lambdas.size() > 0 && dec.lambdas.minCoeff() < -tol) {
    throw ValidationError(std::string("kronecker: ") + name + " is not nonnegative definite");
  }
}

}  // namespace

// --- CovarianceOperator ----------------------------------------------------

CovarianceOperator CovarianceOperator::gue(Eigen::Index d, double sigma2) {
  if (!(sigma2 >= 0.0)) throw ValidationError("gue: sigma2 must be nonnegative");
  CovarianceOperator a;
  a.form_ = Form::kGue;
  a.dim_ = d;
  a.sigma2_ = sigma2;
  a.c_ = Eigen::MatrixXd::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d * d; ++i) a.c_(i, i) = i < d ? sigma2 : 0.5 * sigma2;
  a.factor_ = a.c_.cwiseSqrt();
  return a;
}

CovarianceOperator CovarianceOperator::kronecker(const HermitianMatrix& sigma1, const HermitianMatrix& sigma2) {
  if (sigma1.dim() != sigma2.dim()) throw DimensionError("kronecker: Σ₁ and Σ₂ differ in dimension");
  require_psd(sigma1, "Σ₁");
  require_psd(sigma2, "Σ₂");
  CovarianceOperator a;
  a.form_ = Form::kKronecker;
  a.dim_ = sigma1.dim();
  a.s1_ = sigma1;
  a.s2_ = sigma2;
  const Eigen::Index n = a.dim_ * a.dim_;
  a.c_.resize(n, n);
  std::vector<Eigen::MatrixXcd> theta;
  for (Eigen::Index i = 0; i < n; ++i) theta.push_back(dual_basis_element(a.dim_, i).matrix());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXcd left = theta[static_cast<std::size_t>(i)] * sigma1.matrix();
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = (left * theta[static_cast<std::size_t>(j)] * sigma2.matrix()).trace().real();
      a.c_(i, j) = v;
      a.c_(j, i) = v;
    }
  }
  a.factor_ = psd_factor(a.c_);
  return a;
}

CovarianceOperator CovarianceOperator::trace_identity(Eigen::Index d, double sigma2) {
  if (!(sigma2 >= 0.0)) throw ValidationError("trace_identity: sigma2 must be nonnegative");
  CovarianceOperator a;
  a.form_ = Form::kTraceIdentity;
  a.dim_ = d;
  a.sigma2_ = sigma2;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(d * d);
  tau.head(d).setOnes();
  a.c_ = sigma2 * tau * tau.transpose();
  a.factor_ = std::sqrt(sigma2) * tau;
  return a;
}

CovarianceOperator CovarianceOperator::explicit_matrix(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) throw ValidationError("explicit covariance must be square");
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(c.rows()))));
  if (d * d != c.rows()) throw DimensionError("explicit covariance size is not d²×d²");
  if (!c.allFinite()) throw ValidationError("explicit covariance has non-finite entries");
  const double norm = c.norm();
  if (c.size() > 0 && (c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, norm)) {
    throw ValidationError("explicit covariance is not symmetric");
  }
  CovarianceOperator a;
  a.form_ = Form::kExplicit;
  a.dim_ = d;
  a.c_ = 0.5 * (c + c.transpose());
  if (!a.c_.isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.c_);
    if (es.eigenvalues().minCoeff() < -1e-12 * norm) {
      throw ValidationError("explicit covariance is not positive semidefinite (min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
  }
  a.factor_ = psd_factor(a.c_);
  return a;
}

CovarianceOperator CovarianceOperator::zero(Eigen::Index d) {
  return explicit_matrix(Eigen::MatrixXd::Zero(d * d, d * d));
}

HermitianMatrix CovarianceOperator::apply(const HermitianMatrix& theta) const {
  if (theta.dim() != dim_) throw DimensionError("covariance apply: dimension mismatch");
  const Eigen::VectorXd v = c_ * dual_weights(theta);
  return devectorize(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

double CovarianceOperator::pair_coefficient(Eigen::Index k, Eigen::Index h) const {
  switch (form_) {
    case Form::kGue:
      return sigma2_;
    case Form::kKronecker:
      return (s1_(k, k) * s2_(h, h)).real();
    case Form::kTraceIdentity:
      return k == h ? sigma2_ : 0.0;
    case Form::kExplicit:
      break;
  }
  throw PreconditionError("pair coefficients are defined only for the named covariance forms");
}

HermitianMatrix gaussian_increment(const CovarianceOperator& a, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw ValidationError("gaussian_increment: dt must be positive");
  const Eigen::MatrixXd& l = a.factor();
  if (l.cols() == 0) return HermitianMatrix(a.dim());
  Eigen::VectorXd z(l.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  const Eigen::VectorXd v = std::sqrt(dt) * (l * z);
  return devectorize(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

// --- RadialLaw -------------------------------------------------------------

RadialLaw RadialLaw::point_mass(double r0, bool symmetric) {
  RadialLaw r;
  r.kind = Kind::kPointMass;
  r.r0 = r0;
  r.symmetric = symmetric;
  r.validate();
  return r;
}

RadialLaw RadialLaw::exponential(double beta, bool symmetric) {
  RadialLaw r;
  r.kind = Kind::kExponential;
  r.beta = beta;
  r.symmetric = symmetric;
  r.validate();
  return r;
}

RadialLaw RadialLaw::stable_truncated(double alpha, double r_min, double r_max, bool symmetric) {
  RadialLaw r;
  r.kind = Kind::kStableTruncated;
  r.alpha = alpha;
  r.r_min = r_min;
  r.r_max = r_max;
  r.symmetric = symmetric;
  r.validate();
  return r;
}

void RadialLaw::validate() const {
  switch (kind) {
    case Kind::kPointMass:
      if (!(r0 > 0.0) || !std::isfinite(r0)) throw ModelError("point_mass: r0 must be positive and finite");
      break;
    case Kind::kExponential:
      if (!(beta > 0.0) || !std::isfinite(beta)) throw ModelError("exponential: beta must be positive");
      break;
    case Kind::kStableTruncated:
      if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("stable_truncated: alpha must lie in (0, 2)");
      if (!(r_min >= 0.0) || !(r_max > r_min)) throw ModelError("stable_truncated: need 0 <= r_min < r_max");
      break;
  }
}

double RadialLaw::moment(int p, double a, double b) const {
  a = std::max(a, 0.0);
  if (!(b > a)) return 0.0;
  switch (kind) {
    case Kind::kPointMass:
      return (r0 > a && r0 <= b) ? std::pow(r0, p) : 0.0;
    case Kind::kExponential: {
      const auto antiderivative = [&](double r) {
        if (std::isinf(r)) return 0.0;
        const double e = std::exp(-beta * r);
        switch (p) {
          case 0: return -e;
          case 1: return -(r + 1.0 / beta) * e;
          case 2: return -(r * r + 2.0 * r / beta + 2.0 / (beta * beta)) * e;
          default: throw ModelError("exponential radial: moments above order 2 are not tabulated");
        }
      };
      return antiderivative(b) - antiderivative(a);
    }
    case Kind::kStableTruncated: {
      const double lo = std::max(a, r_min);
      const double hi = std::min(b, r_max);
      if (!(hi > lo)) return 0.0;
      const double q = p - alpha;
      if (lo == 0.0 && q <= 0.0) return kInf;
      if (std::isinf(hi) && q >= 0.0) return kInf;
      if (q == 0.0) return std::log(hi / lo);
      const double hq = std::isinf(hi) ? 0.0 : std::pow(hi, q);
      const double lq = lo == 0.0 ? 0.0 : std::pow(lo, q);
      return (hq - lq) / q;
    }
  }
  return 0.0;
}

double RadialLaw::sample_above(double a, Rng& rng) const {
  a = std::max(a, 0.0);
  switch (kind) {
    case Kind::kPointMass:
      if (!(r0 > a)) throw ModelError("point_mass: no mass above the cutoff");
      return r0;
    case Kind::kExponential:
      return a - std::log1p(-uniform01(rng)) / beta;
    case Kind::kStableTruncated: {
      const double lo = std::max(a, r_min);
      if (!(lo > 0.0)) throw ModelError("stable_truncated: infinite mass near zero; a positive cutoff is required");
      if (!(r_max > lo)) throw ModelError("stable_truncated: no mass above the cutoff");
      const double la = std::pow(lo, -alpha);
      const double lb = std::isinf(r_max) ? 0.0 : std::pow(r_max, -alpha);
      const double u = uniform01(rng);
      return std::pow(la - u * (la - lb), -1.0 / alpha);
    }
  }
  return 0.0;
}

std::string RadialLaw::density() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kPointMass:
      os << "atom at r0=" << r0 << " (no density)";
      break;
    case Kind::kExponential:
      os << "g(u) = " << beta << "*exp(-" << beta << "*u) on (0, inf)";
      break;
    case Kind::kStableTruncated:
      os << "g(u) = u^(-1-" << alpha << ") on (" << r_min << ", " << r_max << ")";
      break;
  }
  if (symmetric) os << ", symmetric sign";
  return os.str();
}

// --- LevyMeasureSpec -------------------------------------------------------

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sign_draw(const RadialLaw& radial, Rng& rng) {
  if (!radial.symmetric) return 1.0;
  return uniform01(rng) < 0.5 ? -1.0 : 1.0;
}

double scalar_intensity(const ScalarJumpSpec& s, double threshold) {
  if (s.rate == 0.0) return 0.0;
  return s.rate * s.radial.mass_above(threshold);
}

HermitianMatrix gue_matrix(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    g(i, i) = standard_normal(rng);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double re = standard_normal(rng) * std::sqrt(0.5);
      const double im = standard_normal(rng) * std::sqrt(0.5);
      g(i, j) = cplx(re, im);
      g(j, i) = cplx(re, -im);
    }
  }
  return HermitianMatrix(g);
}

void check_unitary(const Eigen::MatrixXcd& u, Eigen::Index d, const char* who) {
  if (u.rows() != d || u.cols() != d) throw ModelError(std::string(who) + ": frame must be d×d");
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).norm() > 1e-10) {
    throw ModelError(std::string(who) + ": frame is not unitary");
  }
}

void check_scalar(const ScalarJumpSpec& s, const char* who) {
  if (!(s.rate >= 0.0) || !std::isfinite(s.rate)) throw ModelError(std::string(who) + ": rate must be finite and >= 0");
  s.radial.validate();
}

}  // namespace

std::string LevyMeasureSpec::family_name() const {
  return std::visit(Overloaded{
                        [](const RankOneUniform&) { return std::string("rank_one_uniform"); },
                        [](const DiagonalIndependent&) { return std::string("diagonal_independent"); },
                        [](const FullRankCompoundPoisson&) { return std::string("full_rank_cp"); },
                        [](const QvVectorLevy&) { return std::string("qv_vector_levy"); },
                        [](const QvDifference&) { return std::string("qv_difference"); },
                    },
                    family);
}

void LevyMeasureSpec::validate() const {
  if (dim < 1) throw ModelError("jump measure: dim must be >= 1");
  std::visit(Overloaded{
                 [&](const RankOneUniform& f) { check_scalar({f.rate, f.radial}, "rank_one_uniform"); },
                 [&](const DiagonalIndependent& f) {
                   if (static_cast<Eigen::Index>(f.coordinates.size()) != dim) {
                     throw ModelError("diagonal_independent: need one scalar spec per coordinate");
                   }
                   for (const auto& c : f.coordinates) check_scalar(c, "diagonal_independent");
                   check_unitary(f.frame, dim, "diagonal_independent");
                 },
                 [&](const FullRankCompoundPoisson& f) {
                   if (!(f.rate >= 0.0) || !std::isfinite(f.rate)) throw ModelError("full_rank_cp: rate must be finite and >= 0");
                   if (f.sampler.kind == FullRankSampler::Kind::kFrameDiagonal) {
                     check_unitary(f.sampler.frame, dim, "full_rank_cp");
                   }
                   if (!(f.sampler.scale >= 0.0)) throw ModelError("full_rank_cp: scale must be >= 0");
                 },
                 [&](const QvVectorLevy& f) {
                   check_scalar(f.vector_jumps, "qv_vector_levy");
                   if (f.vector_jumps.radial.symmetric) throw ModelError("qv_vector_levy: radial law of |ΔY| cannot be symmetric");
                 },
                 [&](const QvDifference& f) {
                   check_scalar(f.positive, "qv_difference");
                   check_scalar(f.negative, "qv_difference");
                   if (f.positive.radial.symmetric || f.negative.radial.symmetric) {
                     throw ModelError("qv_difference: radial laws of |ΔY| cannot be symmetric");
                   }
                 },
             },
             family);
}

double jump_intensity(const LevyMeasureSpec& nu, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ModelError("jump cutoff must lie in (0, 1]");
  const double d = static_cast<double>(nu.dim);
  const double lambda = std::visit(
      Overloaded{
          [&](const RankOneUniform& f) { return scalar_intensity({f.rate, f.radial}, eps); },
          [&](const DiagonalIndependent& f) {
            double s = 0.0;
            for (const auto& c : f.coordinates) s += scalar_intensity(c, eps);
            return s;
          },
          [&](const FullRankCompoundPoisson& f) {
            if (f.sampler.kind == FullRankSampler::Kind::kScalarIdentity) {
              return std::abs(f.sampler.c) * std::sqrt(d) > eps ? f.rate : 0.0;
            }
            return f.rate;
          },
          [&](const QvVectorLevy& f) { return scalar_intensity(f.vector_jumps, std::sqrt(eps)); },
          [&](const QvDifference& f) {
            return scalar_intensity(f.positive, std::sqrt(eps)) + scalar_intensity(f.negative, std::sqrt(eps));
          },
      },
      nu.family);
  if (!std::isfinite(lambda)) {
    throw ModelError(nu.family_name() + ": infinite jump intensity above cutoff " + std::to_string(eps));
  }
  return lambda;
}

std::optional<HermitianMatrix> sample_jump_size(const LevyMeasureSpec& nu, double eps, Rng& rng) {
  const Eigen::Index d = nu.dim;
  return std::visit(
      Overloaded{
          [&](const RankOneUniform& f) -> std::optional<HermitianMatrix> {
            const double r = f.radial.sample_above(eps, rng);
            const double s = sign_draw(f.radial, rng);
            const Eigen::VectorXcd u = uniform_sphere_vector(d, rng);
            return HermitianMatrix::outer(u, s * r);
          },
          [&](const DiagonalIndependent& f) -> std::optional<HermitianMatrix> {
            double total = 0.0;
            std::vector<double> w;
            for (const auto& c : f.coordinates) {
              w.push_back(scalar_intensity(c, eps));
              total += w.back();
            }
            double pick = uniform01(rng) * total;
            std::size_t i = 0;
            while (i + 1 < w.size() && pick >= w[i]) {
              pick -= w[i];
              ++i;
            }
            while (w[i] == 0.0 && i > 0) --i;
            const auto& c = f.coordinates[i];
            const double r = c.radial.sample_above(eps, rng);
            const double s = sign_draw(c.radial, rng);
            return HermitianMatrix::outer(f.frame.col(static_cast<Eigen::Index>(i)), s * r);
          },
          [&](const FullRankCompoundPoisson& f) -> std::optional<HermitianMatrix> {
            const auto& smp = f.sampler;
            HermitianMatrix y(d);
            switch (smp.kind) {
              case FullRankSampler::Kind::kScalarIdentity: {
                const double s = smp.symmetric ? (uniform01(rng) < 0.5 ? -1.0 : 1.0) : 1.0;
                y = HermitianMatrix::identity(d) * (s * smp.c);
                break;
              }
              case FullRankSampler::Kind::kFrameDiagonal: {
                std::vector<double> g(static_cast<std::size_t>(d));
                for (auto& v : g) v = smp.scale * standard_normal(rng);
                y = HermitianMatrix::diagonal(g).conjugated(smp.frame);
                break;
              }
              case FullRankSampler::Kind::kGue: {
                const double s = smp.symmetric ? (uniform01(rng) < 0.5 ? -1.0 : 1.0) : 1.0;
                y = HermitianMatrix::identity(d) * (s * smp.c) + gue_matrix(d, rng) * smp.scale;
                break;
              }
            }
            if (!(frobenius_norm(y) > eps)) return std::nullopt;
            return y;
          },
          [&](const QvVectorLevy& f) -> std::optional<HermitianMatrix> {
            const double rho = f.vector_jumps.radial.sample_above(std::sqrt(eps), rng);
            const Eigen::VectorXcd v = uniform_sphere_vector(d, rng);
            return HermitianMatrix::outer(v, rho * rho);
          },
          [&](const QvDifference& f) -> std::optional<HermitianMatrix> {
            const double root = std::sqrt(eps);
            const double wp = scalar_intensity(f.positive, root);
            const double wn = scalar_intensity(f.negative, root);
            const bool positive = uniform01(rng) * (wp + wn) < wp;
            const auto& spec = positive ? f.positive : f.negative;
            const double rho = spec.radial.sample_above(root, rng);
            const Eigen::VectorXcd v = uniform_sphere_vector(d, rng);
            return HermitianMatrix::outer(v, (positive ? 1.0 : -1.0) * rho * rho);
          },
      },
      nu.family);
}

std::vector<TimedJump> sample_jumps(const LevyMeasureSpec& nu, double t0, double t1, double eps, Rng& rng) {
  if (!(t1 > t0)) throw ValidationError("sample_jumps: need t1 > t0");
  const double lambda = jump_intensity(nu, eps);
  std::vector<TimedJump> out;
  if (lambda == 0.0) return out;
  double t = t0;
  for (;;) {
    t += -std::log1p(-uniform01(rng)) / lambda;
    if (t > t1) break;
    auto y = sample_jump_size(nu, eps, rng);
    if (y) out.push_back({t, std::move(*y)});
  }
  return out;
}

HermitianMatrix compensator_drift(const LevyMeasureSpec& nu, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ModelError("jump cutoff must lie in (0, 1]");
  const Eigen::Index d = nu.dim;
  const double dd = static_cast<double>(d);
  const HermitianMatrix iso = HermitianMatrix::identity(d) * (1.0 / dd);
  return std::visit(
      Overloaded{
          [&](const RankOneUniform& f) {
            if (f.radial.symmetric || f.rate == 0.0) return HermitianMatrix(d);
            return iso * (f.rate * f.radial.moment(1, eps, 1.0));
          },
          [&](const DiagonalIndependent& f) {
            HermitianMatrix out(d);
            for (std::size_t i = 0; i < f.coordinates.size(); ++i) {
              const auto& c = f.coordinates[i];
              if (c.radial.symmetric || c.rate == 0.0) continue;
              const double m1 = c.rate * c.radial.moment(1, eps, 1.0);
              if (m1 != 0.0) out += HermitianMatrix::outer(f.frame.col(static_cast<Eigen::Index>(i)), m1);
            }
            return out;
          },
          [&](const FullRankCompoundPoisson& f) {
            const auto& smp = f.sampler;
            const auto scalar_case = [&]() {
              const double norm = std::abs(smp.c) * std::sqrt(dd);
              if (smp.symmetric || !(norm > eps && norm <= 1.0)) return HermitianMatrix(d);
              return HermitianMatrix::identity(d) * (f.rate * smp.c);
            };
            switch (smp.kind) {
              case FullRankSampler::Kind::kScalarIdentity:
                return scalar_case();
              case FullRankSampler::Kind::kFrameDiagonal:
                return HermitianMatrix(d);
              case FullRankSampler::Kind::kGue:
                if (smp.c == 0.0 || smp.symmetric) return HermitianMatrix(d);
                if (smp.scale == 0.0) return scalar_case();
                break;
            }
            throw NeedsQuadratureError(
                "full_rank_cp/gue: compensator needs numeric quadrature of the integrand "
                "y * 1{eps < ||y||_F <= 1} with y = c*I + scale*G, G ~ GUE");
          },
          [&](const QvVectorLevy& f) {
            if (f.vector_jumps.rate == 0.0) return HermitianMatrix(d);
            return iso * (f.vector_jumps.rate * f.vector_jumps.radial.moment(2, std::sqrt(eps), 1.0));
          },
          [&](const QvDifference& f) {
            const double root = std::sqrt(eps);
            const double mp = f.positive.rate == 0.0 ? 0.0 : f.positive.rate * f.positive.radial.moment(2, root, 1.0);
            const double mn = f.negative.rate == 0.0 ? 0.0 : f.negative.rate * f.negative.radial.moment(2, root, 1.0);
            return iso * (mp - mn);
          },
      },
      nu.family);
}

namespace {

ConditionD radial_condition(const RadialLaw& r, double rate, bool squared) {
  ConditionD v;
  v.density = r.density();
  if (squared) v.density += " (law of |dY|; matrix jump norm is its square)";
  if (rate == 0.0) {
    v.status = ConditionD::Status::kNotApplicable;
    v.reason = "zero Levy measure";
    return v;
  }
  switch (r.kind) {
    case RadialLaw::Kind::kPointMass:
      v.status = ConditionD::Status::kFails;
      v.reason = "radial law is an atom, not absolutely continuous";
      break;
    case RadialLaw::Kind::kExponential:
      v.status = ConditionD::Status::kFails;
      v.reason = "finite activity: integral of g is finite";
      break;
    case RadialLaw::Kind::kStableTruncated:
      if (r.r_min == 0.0) {
        v.status = ConditionD::Status::kHolds;
        v.self_decomposable = true;
        v.reason = "integral of u^(-1-alpha) diverges at 0; g = k(u)/u with k(u) = u^(-alpha) decreasing, k(0+) > 0";
      } else {
        v.status = ConditionD::Status::kFails;
        v.reason = "r_min > 0 gives finite total mass";
      }
      break;
  }
  return v;
}

ConditionD combine(const ConditionD& a, const ConditionD& b) {
  if (a.status == ConditionD::Status::kNotApplicable) return b;
  if (b.status == ConditionD::Status::kNotApplicable) return a;
  ConditionD v;
  v.density = a.density + "; " + b.density;
  if (a.status == ConditionD::Status::kHolds && b.status == ConditionD::Status::kHolds) {
    v.status = ConditionD::Status::kHolds;
    v.self_decomposable = a.self_decomposable && b.self_decomposable;
    v.reason = "every direction has a divergent radial density";
  } else {
    v.status = ConditionD::Status::kFails;
    v.reason = a.status == ConditionD::Status::kFails ? a.reason : b.reason;
  }
  return v;
}

}  // namespace

ConditionD condition_d_check(const std::optional<LevyMeasureSpec>& nu) {
  if (!nu) {
    ConditionD v;
    v.reason = "no jump component";
    return v;
  }
  return std::visit(Overloaded{
                        [](const RankOneUniform& f) { return radial_condition(f.radial, f.rate, false); },
                        [](const DiagonalIndependent& f) {
                          ConditionD v;
                          v.reason = "zero Levy measure";
                          for (const auto& c : f.coordinates) v = combine(v, radial_condition(c.radial, c.rate, false));
                          return v;
                        },
                        [](const FullRankCompoundPoisson& f) {
                          ConditionD v;
                          if (f.rate == 0.0) {
                            v.reason = "zero Levy measure";
                            return v;
                          }
                          v.status = ConditionD::Status::kFails;
                          v.density = "finite jump law";
                          v.reason = "finite activity: compound Poisson";
                          return v;
                        },
                        [](const QvVectorLevy& f) { return radial_condition(f.vector_jumps.radial, f.vector_jumps.rate, true); },
                        [](const QvDifference& f) {
                          return combine(radial_condition(f.positive.radial, f.positive.rate, true),
                                         radial_condition(f.negative.radial, f.negative.rate, true));
                        },
                    },
                    nu->family);
}

void LevyTriplet::validate() const {
  const Eigen::Index d = a.dim();
  if (d < 1) throw ModelError("triplet: dimension must be >= 1");
  if (psi.dim() != d) throw ModelError("triplet: drift dimension differs from covariance dimension");
  if (nu) {
    if (nu->dim != d) throw ModelError("triplet: jump measure dimension differs from covariance dimension");
    nu->validate();
  }
  if (a.is_zero() && !nu && psi.is_zero()) throw ModelError("triplet: all of A, nu and Psi vanish");
}

ModelFlags model_validity_flags(const LevyTriplet& triplet) {
  ModelFlags f;
  if (!triplet.a.is_zero()) {
    f.absolutely_continuous = true;
    f.reason = "Gaussian component present";
  } else if (!triplet.nu) {
    f.reason = "no Gaussian and no jumps: deterministic drift";
  } else if (std::holds_alternative<DiagonalIndependent>(triplet.nu->family) && triplet.dim() > 1) {
    f.reason = "degenerate: jumps stay in the commutative subspace U diag(.) U*";
  } else {
    const auto cd = condition_d_check(triplet.nu);
    if (cd.status == ConditionD::Status::kHolds) {
      f.absolutely_continuous = true;
      f.reason = "no Gaussian component; condition D holds (" + cd.reason + ")";
    } else {
      f.reason = "finite activity, condition D fails (" + cd.reason + ")";
    }
  }
  f.simple_spectrum_as = f.absolutely_continuous;
  return f;
}

HermitianMatrix effective_drift(const LevyTriplet& triplet, double eps) {
  if (!triplet.nu) return triplet.psi;
  return triplet.psi - compensator_drift(*triplet.nu, eps);
}

}  // namespace hlevy
