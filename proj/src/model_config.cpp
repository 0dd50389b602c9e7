#include "hlevy/model_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hlevy/errors.hpp"

namespace hlevy {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError("config key '" + key + "': " + msg);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) {
      std::string list;
      for (const auto& s : ok) list += (list.empty() ? "" : ", ") + s;
      fail(where.empty() ? k : where + "." + k, "unknown key (allowed: " + list + ")");
    }
  }
}

const json& require(const json& j, const std::string& where, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(where.empty() ? key : where + "." + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

double number_or(const json& parent, const std::string& where, const char* key, double fallback) {
  if (!parent.contains(key)) return fallback;
  return number(parent.at(key), where + "." + key);
}

bool bool_or(const json& parent, const std::string& where, const char* key, bool fallback) {
  if (!parent.contains(key)) return fallback;
  const json& v = parent.at(key);
  if (!v.is_boolean()) fail(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string choice(const json& j, const std::string& key, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  if (!j.is_string()) fail(key, "expected one of: " + list);
  const std::string s = j.get<std::string>();
  for (const char* a : allowed)
    if (s == a) return s;
  fail(key, "unknown value '" + s + "' (allowed: " + list + ")");
}

Eigen::MatrixXcd complex_matrix(const json& j, const std::string& key, Eigen::Index d) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) fail(key, "expected " + std::to_string(d) + " rows");
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      fail(key + "[" + std::to_string(i) + "]", "expected " + std::to_string(d) + " entries");
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      const std::string ek = key + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(ek, "expected a real or a [re, im] pair");
      }
    }
  }
  return m;
}

HermitianMatrix hermitian(const json& j, const std::string& key, Eigen::Index d) {
  try {
    return HermitianMatrix(complex_matrix(j, key, d));
  } catch (const ValidationError& e) {
    fail(key, e.what());
  }
}

Eigen::MatrixXcd frame(const json& parent, const std::string& where, Eigen::Index d) {
  if (!parent.contains("frame")) return Eigen::MatrixXcd::Identity(d, d);
  const json& f = parent.at("frame");
  if (f.is_string()) {
    choice(f, where + ".frame", {"identity"});
    return Eigen::MatrixXcd::Identity(d, d);
  }
  Eigen::MatrixXcd u = complex_matrix(f, where + ".frame", d);
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).norm() > 1e-10) fail(where + ".frame", "not unitary");
  return u;
}

RadialLaw radial(const json& j, const std::string& key) {
  if (!j.is_object()) fail(key, "expected an object");
  const std::string law = choice(require(j, key, "law"), key + ".law", {"point_mass", "exponential", "stable_truncated"});
  const bool sym = bool_or(j, key, "symmetric", false);
  try {
    if (law == "point_mass") {
      allow_keys(j, key, {"law", "r0", "symmetric"});
      return RadialLaw::point_mass(number(require(j, key, "r0"), key + ".r0"), sym);
    }
    if (law == "exponential") {
      allow_keys(j, key, {"law", "beta", "symmetric"});
      return RadialLaw::exponential(number(require(j, key, "beta"), key + ".beta"), sym);
    }
    allow_keys(j, key, {"law", "alpha", "r_min", "r_max", "symmetric"});
    return RadialLaw::stable_truncated(number(require(j, key, "alpha"), key + ".alpha"),
                                       number_or(j, key, "r_min", 0.0),
                                       number_or(j, key, "r_max", std::numeric_limits<double>::infinity()), sym);
  } catch (const ModelError& e) {
    fail(key, e.what());
  }
}

ScalarJumpSpec scalar_spec(const json& j, const std::string& key) {
  if (!j.is_object()) fail(key, "expected an object");
  allow_keys(j, key, {"rate", "radial"});
  return {number(require(j, key, "rate"), key + ".rate"), radial(require(j, key, "radial"), key + ".radial")};
}

CovarianceOperator gaussian(const json& j, Eigen::Index d) {
  const std::string key = "gaussian";
  if (!j.is_object()) fail(key, "expected an object");
  const std::string form =
      choice(require(j, key, "form"), key + ".form", {"gue", "kronecker", "trace_identity", "explicit", "none"});
  try {
    if (form == "gue") {
      allow_keys(j, key, {"form", "sigma2"});
      return CovarianceOperator::gue(d, number(require(j, key, "sigma2"), key + ".sigma2"));
    }
    if (form == "trace_identity") {
      allow_keys(j, key, {"form", "sigma2"});
      return CovarianceOperator::trace_identity(d, number(require(j, key, "sigma2"), key + ".sigma2"));
    }
    if (form == "kronecker") {
      allow_keys(j, key, {"form", "sigma1", "sigma2_matrix"});
      return CovarianceOperator::kronecker(hermitian(require(j, key, "sigma1"), key + ".sigma1", d),
                                           hermitian(require(j, key, "sigma2_matrix"), key + ".sigma2_matrix", d));
    }
    if (form == "explicit") {
      allow_keys(j, key, {"form", "matrix"});
      const json& m = require(j, key, "matrix");
      const Eigen::Index n = d * d;
      if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != n) fail(key + ".matrix", "expected d² rows");
      Eigen::MatrixXd c(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = m[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
          fail(key + ".matrix[" + std::to_string(i) + "]", "expected d² entries");
        }
        for (Eigen::Index k = 0; k < n; ++k) c(i, k) = number(row[static_cast<std::size_t>(k)], key + ".matrix");
      }
      return CovarianceOperator::explicit_matrix(c);
    }
    allow_keys(j, key, {"form"});
    return CovarianceOperator::zero(d);
  } catch (const ValidationError& e) {
    fail(key, e.what());
  } catch (const DimensionError& e) {
    fail(key, e.what());
  }
}

FullRankSampler sampler(const json& j, const std::string& key, Eigen::Index d) {
  if (!j.is_object()) fail(key, "expected an object");
  allow_keys(j, key, {"kind", "c", "scale", "symmetric", "frame"});
  FullRankSampler s;
  const std::string kind = choice(require(j, key, "kind"), key + ".kind", {"scalar_identity", "frame_diagonal", "gue"});
  s.kind = kind == "scalar_identity"  ? FullRankSampler::Kind::kScalarIdentity
           : kind == "frame_diagonal" ? FullRankSampler::Kind::kFrameDiagonal
                                      : FullRankSampler::Kind::kGue;
  s.c = number_or(j, key, "c", kind == "frame_diagonal" ? 0.0 : 1.0);
  s.scale = number_or(j, key, "scale", kind == "scalar_identity" ? 0.0 : 1.0);
  s.symmetric = bool_or(j, key, "symmetric", false);
  s.frame = frame(j, key, d);
  return s;
}

std::pair<LevyMeasureSpec, double> jumps(const json& j, Eigen::Index d) {
  const std::string key = "jumps";
  if (!j.is_object()) fail(key, "expected an object");
  const std::string family =
      choice(require(j, key, "family"), key + ".family",
             {"rank_one_uniform", "diagonal_independent", "full_rank_cp", "qv_vector_levy", "qv_difference"});
  const double cutoff = number_or(j, key, "cutoff", 1e-3);
  if (!(cutoff > 0.0 && cutoff <= 1.0)) fail(key + ".cutoff", "must lie in (0, 1]");
  LevyMeasureSpec nu;
  nu.dim = d;
  if (family == "rank_one_uniform") {
    allow_keys(j, key, {"family", "rate", "radial", "cutoff"});
    nu.family = RankOneUniform{number(require(j, key, "rate"), key + ".rate"), radial(require(j, key, "radial"), key + ".radial")};
  } else if (family == "diagonal_independent") {
    allow_keys(j, key, {"family", "coordinates", "frame", "cutoff"});
    const json& cs = require(j, key, "coordinates");
    if (!cs.is_array() || static_cast<Eigen::Index>(cs.size()) != d) fail(key + ".coordinates", "expected d entries");
    DiagonalIndependent f;
    for (std::size_t i = 0; i < cs.size(); ++i) f.coordinates.push_back(scalar_spec(cs[i], key + ".coordinates[" + std::to_string(i) + "]"));
    f.frame = frame(j, key, d);
    nu.family = f;
  } else if (family == "full_rank_cp") {
    allow_keys(j, key, {"family", "rate", "sampler", "cutoff"});
    nu.family = FullRankCompoundPoisson{number(require(j, key, "rate"), key + ".rate"),
                                        sampler(require(j, key, "sampler"), key + ".sampler", d)};
  } else if (family == "qv_vector_levy") {
    allow_keys(j, key, {"family", "rate", "radial", "cutoff"});
    nu.family = QvVectorLevy{{number(require(j, key, "rate"), key + ".rate"), radial(require(j, key, "radial"), key + ".radial")}};
  } else {
    allow_keys(j, key, {"family", "positive", "negative", "cutoff"});
    nu.family = QvDifference{scalar_spec(require(j, key, "positive"), key + ".positive"),
                             scalar_spec(require(j, key, "negative"), key + ".negative")};
  }
  try {
    nu.validate();
  } catch (const ModelError& e) {
    fail(key, e.what());
  }
  return {nu, cutoff};
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

ModelConfig parse_model_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  allow_keys(j, "", {"dim", "gaussian", "jumps", "drift", "seed", "simulation"});
  ModelConfig cfg;
  cfg.source = j;

  const json& dj = require(j, "", "dim");
  if (!dj.is_number_integer() || dj.get<long long>() < 1) fail("dim", "expected a positive integer");
  const Eigen::Index d = dj.get<Eigen::Index>();

  CovarianceOperator a = j.contains("gaussian") ? gaussian(j.at("gaussian"), d) : CovarianceOperator::zero(d);
  std::optional<LevyMeasureSpec> nu;
  cfg.sim.cutoff = 1e-3;
  if (j.contains("jumps") && !j.at("jumps").is_null()) {
    auto [spec, cut] = jumps(j.at("jumps"), d);
    nu = spec;
    cfg.sim.cutoff = cut;
  }

  HermitianMatrix psi(d);
  if (j.contains("drift")) {
    const json& dr = j.at("drift");
    if (dr.is_string()) {
      choice(dr, "drift", {"compensate"});
      if (!nu) fail("drift", "'compensate' needs a jumps section");
      try {
        psi = compensator_drift(*nu, cfg.sim.cutoff);
      } catch (const ModelError& e) {
        fail("drift", e.what());
      }
    } else {
      if (!dr.is_array() || static_cast<Eigen::Index>(dr.size()) != d * d) {
        fail("drift", "expected " + std::to_string(d * d) + " reals in coordinate order");
      }
      std::vector<double> v;
      for (std::size_t i = 0; i < dr.size(); ++i) v.push_back(number(dr[i], "drift[" + std::to_string(i) + "]"));
      psi = devectorize(std::span<const double>(v));
    }
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.sim.seed = s.get<std::uint64_t>();
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    if (!s.is_object()) fail("simulation", "expected an object");
    allow_keys(s, "simulation", {"t_max", "steps", "paths"});
    cfg.sim.t_max = number_or(s, "simulation", "t_max", cfg.sim.t_max);
    if (s.contains("steps")) {
      if (!s.at("steps").is_number_integer()) fail("simulation.steps", "expected an integer");
      cfg.sim.steps = s.at("steps").get<int>();
    }
    if (s.contains("paths")) {
      if (!s.at("paths").is_number_integer()) fail("simulation.paths", "expected an integer");
      cfg.sim.paths = s.at("paths").get<int>();
    }
  }
  try {
    cfg.sim.validate();
  } catch (const ValidationError& e) {
    fail("simulation", e.what());
  }

  cfg.triplet = LevyTriplet{std::move(a), std::move(nu), std::move(psi)};
  try {
    cfg.triplet.validate();
  } catch (const ModelError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ModelConfig parse_model_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  return parse_model_config(j);
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

}  // namespace hlevy
