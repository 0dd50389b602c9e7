#include "hlevy/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <thread>

#include "hlevy/errors.hpp"
#include "hlevy/hadamard.hpp"
#include "hlevy/io.hpp"
#include "hlevy/jump_analysis.hpp"
#include "hlevy/sde_verifier.hpp"
#include "hlevy/spectral_tracking.hpp"

namespace hlevy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string numbered(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d.csv", prefix, i);
  return buf;
}

// Runs fn(i) for i in [0, n) on a small worker pool; the first exception is
// rethrown after all workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n || failed) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

json flags_json(const ModelFlags& f) {
  return {{"absolutely_continuous", f.absolutely_continuous},
          {"simple_spectrum_as", f.simple_spectrum_as},
          {"reason", f.reason}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Run {
  json manifest;
  ModelConfig cfg;
  std::string echo;
  std::vector<std::string> path_files;
};

// Loads a run directory, checking digests and config echoes.
Run load_run(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw ValidationError("missing input: " + mpath.string());
  Run run;
  try {
    run.manifest = json::parse(read_file(mpath.string()));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest.json is not valid JSON: ") + e.what());
  }
  if (!run.manifest.contains("config") || !run.manifest.contains("files")) {
    throw ValidationError("manifest.json lacks 'config' or 'files'");
  }
  run.cfg = parse_model_config(run.manifest.at("config"));
  run.echo = run.cfg.echo();
  for (const auto& f : run.manifest.at("files")) {
    const std::string name = f.at("name").get<std::string>();
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw ValidationError("missing input: " + p.string());
    const std::string bytes = read_file(p.string());
    if (sha256_hex(bytes) != f.at("sha256").get<std::string>()) {
      throw ValidationError("digest mismatch for " + name);
    }
    if (name.rfind("path_", 0) == 0) run.path_files.push_back(p.string());
  }
  std::sort(run.path_files.begin(), run.path_files.end());
  return run;
}

PathFile load_path(const Run& run, const std::string& file) {
  PathFile pf = read_path_csv(read_file(file), run.cfg.sim.t_max, run.cfg.sim.steps);
  if (pf.echo != run.echo) throw ValidationError("config echo in " + file + " does not match the manifest");
  if (pf.path.dim() != run.cfg.triplet.dim()) throw DimensionError("path dimension differs from config in " + file);
  pf.path.flags = model_validity_flags(run.cfg.triplet);
  return pf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string verdict_text(const Verdict& v) {
  if (!v.applicable) return "n/a";
  return v.pass ? "pass" : "fail";
}

}  // namespace

ModelConfig effective_config(const ModelConfig& base, std::optional<int> paths, std::optional<int> steps,
                             std::optional<std::uint64_t> seed) {
  json j = base.source;
  j["seed"] = seed ? *seed : base.sim.seed;
  json sim = j.contains("simulation") ? j["simulation"] : json::object();
  sim["t_max"] = base.sim.t_max;
  sim["steps"] = steps ? *steps : base.sim.steps;
  sim["paths"] = paths ? *paths : base.sim.paths;
  j["simulation"] = sim;
  return parse_model_config(j);
}

CommandResult cmd_simulate(const SimulateOptions& opt) {
  ModelConfig base;
  if (!opt.manifest_path.empty()) {
    json m;
    try {
      m = json::parse(read_file(opt.manifest_path));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.contains("config")) throw ConfigError("manifest lacks 'config'");
    base = parse_model_config(m.at("config"));
  } else {
    base = load_model_config(opt.config_path);
  }
  const ModelConfig cfg = effective_config(base, opt.paths, opt.steps, opt.seed);
  const std::string echo = cfg.echo();
  fs::create_directories(opt.out_dir);

  const int n = cfg.sim.paths;
  std::vector<json> entries(static_cast<std::size_t>(2 * n));
  std::vector<json> exclusions(static_cast<std::size_t>(n));
  const std::string started = utc_now();
  parallel_for(n, opt.threads, [&](int i) {
    const SamplePath path = simulate_path(cfg.triplet, cfg.sim, static_cast<std::uint64_t>(i));
    const EigenPath eig = eigen_path(path);
    const std::string pc = path_csv(path, echo);
    const std::string ec = eigen_csv(eig, path, echo);
    const std::string pn = numbered("path", i);
    const std::string en = numbered("eigen", i);
    write_file((fs::path(opt.out_dir) / pn).string(), pc);
    write_file((fs::path(opt.out_dir) / en).string(), ec);
    entries[static_cast<std::size_t>(2 * i)] = {{"name", pn}, {"sha256", sha256_hex(pc)}, {"bytes", pc.size()}};
    entries[static_cast<std::size_t>(2 * i + 1)] = {{"name", en}, {"sha256", sha256_hex(ec)}, {"bytes", ec.size()}};
    exclusions[static_cast<std::size_t>(i)] = {{"path", i},
                                               {"jumps", path.jumps.size()},
                                               {"degenerate_times", eig.degenerate_times.size()},
                                               {"min_gap", finite_or_null(eig.min_gap)}};
  });

  json seeds = json::array();
  for (int i = 0; i < n; ++i) seeds.push_back(path_seed(cfg.sim.seed, static_cast<std::uint64_t>(i)));
  json manifest = {
      {"code_version", kCodeVersion},
      {"config", cfg.source},
      {"master_seed", cfg.sim.seed},
      {"path_seeds", seeds},
      {"t_max", cfg.sim.t_max},
      {"steps", cfg.sim.steps},
      {"paths", n},
      {"cutoff", cfg.sim.cutoff},
      {"flags", flags_json(model_validity_flags(cfg.triplet))},
      {"paths_summary", exclusions},
      {"files", entries},
      {"started_utc", started},
      {"finished_utc", utc_now()},
  };
  write_file((fs::path(opt.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return {manifest, true};
}

CommandResult cmd_jumps(const std::string& run_dir) {
  const Run run = load_run(run_dir);
  const ModelFlags flags = model_validity_flags(run.cfg.triplet);
  const Eigen::Index d = run.cfg.triplet.dim();

  std::string lines = config_header(run.echo);
  long total = 0, hw_pass = 0, dis_n = 0, dis_pass = 0, sim_n = 0, sim_pass = 0;
  double hw_min_margin = std::numeric_limits<double>::infinity();
  double min_cross = std::numeric_limits<double>::infinity();
  std::map<int, long> counts;
  std::map<int, long> rank_counts;
  DeltaLambdaHistogram hist;
  for (std::size_t p = 0; p < run.path_files.size(); ++p) {
    const PathFile pf = load_path(run, run.path_files[p]);
    for (const JumpRecord& jr : pf.path.jumps) {
      const Eigen::VectorXd pre = eig_hermitian(jr.x_pre).lambdas;
      const Eigen::VectorXd post = eig_hermitian(jr.x_post).lambdas;
      const JumpClassification c = classify_jump(jr, pre, post, flags.absolutely_continuous);
      ++total;
      ++counts[c.jumped_count];
      ++rank_counts[c.rank];
      hist.add(c, frobenius_norm(jr.delta));
      hw_pass += c.hoffman_wielandt.pass;
      hw_min_margin = std::min(hw_min_margin, c.hoffman_wielandt.margin);
      min_cross = std::min(min_cross, c.min_cross_gap);
      if (c.disjoint.applicable) {
        ++dis_n;
        dis_pass += c.disjoint.pass;
      }
      if (c.simultaneity.applicable) {
        ++sim_n;
        sim_pass += c.simultaneity.pass;
      }
      const json line = {{"path", p},
                         {"t", c.t},
                         {"rank", c.rank},
                         {"commutator", c.commutator},
                         {"commutative", c.commutative},
                         {"jumped_count", c.jumped_count},
                         {"sorted_jumped_count", c.sorted_jumped_count},
                         {"min_cross_gap", c.min_cross_gap},
                         {"hw_margin", c.hoffman_wielandt.margin},
                         {"verdicts",
                          {{"hoffman_wielandt", verdict_text(c.hoffman_wielandt)},
                           {"disjoint", verdict_text(c.disjoint)},
                           {"simultaneity", verdict_text(c.simultaneity)}}}};
      lines += line.dump() + "\n";
    }
  }
  write_file((fs::path(run_dir) / "jumps.jsonl").string(), lines);

  auto rate = [](long pass, long n) { return n > 0 ? json(static_cast<double>(pass) / n) : json(nullptr); };
  json hist_counts = json::object();
  for (const auto& [k, v] : counts) hist_counts[std::to_string(k)] = v;
  json ranks = json::object();
  for (const auto& [k, v] : rank_counts) ranks[std::to_string(k)] = v;
  json jumped = json::object(), still = json::object();
  for (const auto& [k, v] : hist.jumped()) jumped[std::to_string(k)] = v;
  for (const auto& [k, v] : hist.still()) still[std::to_string(k)] = v;
  json summary = {
      {"config", run.cfg.source},
      {"dim", d},
      {"flags", flags_json(flags)},
      {"jump_count", total},
      {"hoffman_wielandt_pass_rate", rate(hw_pass, total)},
      {"hoffman_wielandt_min_margin", finite_or_null(hw_min_margin)},
      {"disjoint_checked", dis_n},
      {"disjoint_pass_rate", rate(dis_pass, dis_n)},
      {"min_cross_gap", finite_or_null(min_cross)},
      {"simultaneity_checked", sim_n},
      {"simultaneity_pass_rate", rate(sim_pass, sim_n)},
      {"jumped_count_histogram", hist_counts},
      {"rank_histogram", ranks},
      {"delta_lambda_log10_histogram", {{"jumped", jumped}, {"below_tol", still}}},
      {"delta_lambda_min_jumped", finite_or_null(hist.min_jumped())},
      {"delta_lambda_max_below_tol", hist.max_still()},
      {"jump_tol_rel", JumpTolerances{}.jump_rel},
  };
  write_file((fs::path(run_dir) / "jump_summary.json").string(), summary.dump(2) + "\n");
  const bool ok = hw_pass == total;
  return {summary, ok};
}

CommandResult cmd_verify(const std::string& run_dir, const VerifyOptions& opt) {
  if (opt.refine < 0 || opt.refine > 10) throw ConfigError("--refine must lie in [0, 10]");
  const Run run = load_run(run_dir);
  const LevyTriplet& tr = run.cfg.triplet;
  const Eigen::Index d = tr.dim();
  // Exact telescoping needs both the Gaussian part and the integrated drift to vanish.
  const bool pure_jump = tr.a.is_zero() && effective_drift(tr, run.cfg.sim.cutoff).is_zero();

  std::vector<int> strides;
  for (int k = opt.refine; k >= 0; --k) strides.push_back(1 << k);
  const int n = static_cast<int>(run.path_files.size());
  std::vector<std::vector<double>> sup(static_cast<std::size_t>(n));
  std::vector<double> exclusion(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sum_rule(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, opt.threads, [&](int i) {
    const PathFile pf = load_path(run, run.path_files[static_cast<std::size_t>(i)]);
    const EigenPath ep = eigen_path(pf.path);
    for (int s : strides) {
      ReconstructOptions ro;
      ro.stride = s;
      const auto reps = reconstruct_all(ep, pf.path, tr, ro);
      double m = 0.0;
      for (const auto& r : reps) m = std::max(m, r.sup_residual);
      sup[static_cast<std::size_t>(i)].push_back(m);
      if (s == 1) {
        exclusion[static_cast<std::size_t>(i)] = reps.front().exclusion_fraction();
        double worst = 0.0;
        for (std::size_t k = 0; k < reps.front().times.size(); ++k) {
          double s_rec = 0.0;
          for (const auto& r : reps) s_rec += r.reconstruction[k];
          // Evaluation times are a subset of recorded times; locate the state.
          const double t = reps.front().times[k];
          const auto it = std::lower_bound(pf.path.points.begin(), pf.path.points.end(), t,
                                           [](const PathPoint& p, double v) { return p.t < v; });
          const auto& x = pf.path.states[static_cast<std::size_t>(it - pf.path.points.begin())];
          const double trace = x.matrix().trace().real();
          worst = std::max(worst, std::abs(s_rec - trace) / std::max(1.0, std::abs(trace)));
        }
        sum_rule[static_cast<std::size_t>(i)] = worst;
      }
    }
  });

  json table = json::array();
  std::vector<double> medians;
  for (std::size_t l = 0; l < strides.size(); ++l) {
    std::vector<double> col;
    for (const auto& v : sup) col.push_back(v[l]);
    const double med = median(col);
    medians.push_back(med);
    const double mx = col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
    table.push_back({{"steps", run.cfg.sim.steps / strides[l]},
                     {"stride", strides[l]},
                     {"median_sup_residual", finite_or_null(med)},
                     {"max_sup_residual", mx},
                     {"exact", mx <= 1e-10}});
  }
  bool monotone = true;
  for (std::size_t l = 1; l < medians.size(); ++l) monotone = monotone && medians[l] < medians[l - 1];
  const double worst_exclusion = exclusion.empty() ? 0.0 : *std::max_element(exclusion.begin(), exclusion.end());
  const double worst_sum_rule = sum_rule.empty() ? 0.0 : *std::max_element(sum_rule.begin(), sum_rule.end());

  bool passed = worst_exclusion <= 1e-3 && worst_sum_rule <= 1e-10;
  bool pure_jump_exact = true;
  if (pure_jump) {
    for (const auto& v : sup) pure_jump_exact = pure_jump_exact && v.back() <= 1e-10;
    passed = passed && pure_jump_exact;
  }

  // Dyson drift at the fixed reference configuration.
  json dyson = json::array();
  bool dyson_ok = true;
  if (opt.dyson_paths > 1) {
    Eigen::VectorXd x0(2);
    x0 << 1.0, -1.0;
    for (const auto& r : dyson_drift_estimate(2, 1.0, x0, 1e-4, opt.dyson_paths, run.cfg.sim.seed)) {
      dyson.push_back({{"m", r.m + 1},
                       {"estimate_raw", r.raw_mean},
                       {"se_raw", r.raw_se},
                       {"estimate_control_variate", r.cv_mean},
                       {"se_control_variate", r.cv_se},
                       {"theory_c1", r.theory},
                       {"theory_2sigma2", r.theory_doubled},
                       {"z_raw", r.z_raw},
                       {"z_control_variate", r.z_cv},
                       {"z_control_variate_vs_2sigma2", r.z_cv_doubled}});
      dyson_ok = dyson_ok && std::abs(r.z_raw) <= 3.0 && std::abs(r.z_cv) <= 3.0;
    }
    passed = passed && dyson_ok;
  }

  // Hadamard finite-difference report on random matrices.
  json fd = json::array();
  bool fd_ok = true;
  Rng rng = make_rng(run.cfg.sim.seed, 0, Stream::kAuxiliary);
  for (Eigen::Index dim : {2, 3, 4}) {
    double worst_err = 0.0, min_order = 10.0, max_order = -10.0;
    int checked = 0;
    for (int k = 0; k < opt.fd_matrices; ++k) {
      const HermitianMatrix x = gaussian_increment(CovarianceOperator::gue(dim, 1.0), 1.0, rng);
      for (Eigen::Index m = 0; m < dim; ++m) {
        try {
          const FdReport r = fd_check(x, m, 1e-4);
          worst_err = std::max(worst_err, r.grad_err / r.scale);
          if (std::isfinite(r.order_estimate)) {
            min_order = std::min(min_order, r.order_estimate);
            max_order = std::max(max_order, r.order_estimate);
          }
          ++checked;
        } catch (const PreconditionError&) {
        }
      }
    }
    const bool ok = worst_err <= 1e-7 && min_order >= 1.7 && max_order <= 2.3;
    fd_ok = fd_ok && ok;
    fd.push_back({{"dim", dim},
                  {"checked", checked},
                  {"max_grad_err_over_scale", worst_err},
                  {"min_order", min_order},
                  {"max_order", max_order},
                  {"pass", ok}});
  }
  passed = passed && fd_ok;

  json report = {
      {"config", run.cfg.source},
      {"dim", d},
      {"paths", n},
      {"model", pure_jump ? "pure_jump" : "continuous_part"},
      {"flags", flags_json(model_validity_flags(tr))},
      {"refinement", table},
      {"median_monotone", monotone},
      {"pure_jump_exact", pure_jump ? json(pure_jump_exact) : json(nullptr)},
      {"max_exclusion_fraction", worst_exclusion},
      {"sum_rule_max_error", worst_sum_rule},
      {"dyson_drift",
       {{"d", 2},
        {"sigma2", 1.0},
        {"x0", {1.0, -1.0}},
        {"dt", 1e-4},
        {"paths", opt.dyson_paths},
        {"repulsion_coefficient", kGueDriftConstant},
        {"alternative_coefficient", 2.0},
        {"rows", dyson},
        {"pass", dyson_ok}}},
      {"hadamard_fd", fd},
      {"passed", passed},
  };
  write_file((fs::path(run_dir) / "verify.json").string(), report.dump(2) + "\n");
  return {report, passed};
}

}  // namespace hlevy
