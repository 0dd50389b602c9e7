#include "hlevy/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "hlevy/errors.hpp"

namespace hlevy {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string config_header(const std::string& echo) { return "# config: " + echo + "\n"; }

namespace {

void append_row(std::string& out, double t, const HermitianMatrix& x, int is_jump) {
  out += format_double(t);
  const VectorizedHermitian v = vectorize(x);
  for (double c : v.coords()) {
    out += ',';
    out += format_double(c);
  }
  out += is_jump ? ",1\n" : ",0\n";
}

void append_eigen_row(std::string& out, double t, const SpectralDecomposition& s, int is_jump, int is_pre) {
  out += format_double(t);
  for (Eigen::Index m = 0; m < s.dim(); ++m) {
    out += ',';
    out += format_double(s.lambdas[m]);
  }
  out += ',';
  out += format_double(s.min_gap());
  out += is_jump ? ",1" : ",0";
  out += is_pre ? ",1\n" : ",0\n";
}

double parse_double(const std::string& s) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw ValidationError("path file: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  return f;
}

}  // namespace

std::string path_csv(const SamplePath& path, const std::string& echo) {
  const Eigen::Index d = path.dim();
  std::string out = config_header(echo);
  out += "t";
  for (Eigen::Index a = 0; a < d * d; ++a) out += ",c" + std::to_string(a);
  out += ",is_jump\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.points[i].jump >= 0) {
      append_row(out, path.time(i), path.left_limit(i), 0);
      append_row(out, path.time(i), path.states[i], 1);
    } else {
      append_row(out, path.time(i), path.states[i], 0);
    }
  }
  return out;
}

std::string eigen_csv(const EigenPath& eigen, const SamplePath& path, const std::string& echo) {
  const Eigen::Index d = path.dim();
  std::string out = config_header(echo);
  out += "t";
  for (Eigen::Index m = 1; m <= d; ++m) out += ",lambda_" + std::to_string(m);
  out += ",min_gap,is_jump,is_pre\n";
  for (std::size_t i = 0; i < eigen.size(); ++i) {
    const bool jump = path.points[i].jump >= 0;
    if (jump) append_eigen_row(out, eigen.times[i], eigen.left(i), 1, 1);
    append_eigen_row(out, eigen.times[i], eigen.post[i], jump ? 1 : 0, 0);
  }
  return out;
}

PathFile read_path_csv(const std::string& text, double t_max, int steps) {
  std::istringstream in(text);
  std::string line;
  PathFile pf;
  if (!std::getline(in, line) || line.rfind("# config: ", 0) != 0) {
    throw ValidationError("path file: missing '# config:' header");
  }
  pf.echo = line.substr(10);
  if (!std::getline(in, line)) throw ValidationError("path file: missing column header");
  const auto head = split(line);
  if (head.size() < 3 || head.front() != "t" || head.back() != "is_jump") {
    throw ValidationError("path file: unexpected column header");
  }
  const std::size_t n = head.size() - 2;
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (static_cast<std::size_t>(d * d) != n) throw DimensionError("path file: coordinate count is not a square");

  struct Row {
    double t;
    HermitianMatrix x;
    bool jump;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != head.size()) throw ValidationError("path file: row has " + std::to_string(f.size()) + " fields");
    std::vector<double> c(n);
    for (std::size_t a = 0; a < n; ++a) c[a] = parse_double(f[a + 1]);
    rows.push_back({parse_double(f[0]), devectorize(std::span<const double>(c)), f.back() == "1"});
  }

  SamplePath& p = pf.path;
  p.steps = steps;
  p.dt = t_max / steps;
  p.psi_eff = HermitianMatrix(d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    PathPoint pt;
    pt.t = rows[r].t;
    if (rows[r].jump) throw ValidationError("path file: post-jump row without a pre-jump row");
    if (r + 1 < rows.size() && rows[r + 1].jump) {
      if (rows[r + 1].t != rows[r].t) throw ValidationError("path file: jump rows disagree on time");
      p.jumps.push_back(make_jump_record(pt.t, rows[r].x, rows[r + 1].x));
      pt.jump = static_cast<int>(p.jumps.size()) - 1;
      p.states.push_back(rows[r + 1].x);
      ++r;
    } else {
      p.states.push_back(rows[r].x);
    }
    const double k = pt.t / p.dt;
    const long kr = std::lround(k);
    if (std::abs(k - static_cast<double>(kr)) <= 1e-9 && (pt.jump < 0 || kr > 0)) {
      const double tk = kr == steps ? t_max : static_cast<double>(kr) * p.dt;
      if (tk == pt.t) pt.grid = static_cast<int>(kr);
    }
    p.points.push_back(pt);
  }
  p.gaussian.assign(p.points.size(), HermitianMatrix(d));
  if (p.points.empty()) throw ValidationError("path file: no rows");
  return pf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed", 0.0);
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace hlevy
