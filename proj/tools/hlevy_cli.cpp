// Command-line front end: simulate, jumps, verify.

#include <iostream>

#include <CLI11.hpp>

#include "hlevy/errors.hpp"
#include "hlevy/pipeline.hpp"

namespace {

int run(CLI::App& app, int argc, char** argv) {
  using namespace hlevy;

  SimulateOptions sim;
  int paths = 0, steps = 0;
  std::uint64_t seed = 0;
  auto* s = app.add_subcommand("simulate", "simulate paths and eigenvalue paths");
  s->add_option("--config", sim.config_path, "model file (JSON)");
  s->add_option("--manifest", sim.manifest_path, "reproduce the run recorded in a manifest");
  s->add_option("--out", sim.out_dir, "output directory")->required();
  auto* o_paths = s->add_option("--paths", paths, "number of paths")->check(CLI::PositiveNumber);
  auto* o_steps = s->add_option("--steps", steps, "grid steps")->check(CLI::PositiveNumber);
  auto* o_seed = s->add_option("--seed", seed, "master seed");
  s->add_option("--threads", sim.threads, "worker threads (0: all cores)");

  std::string jumps_dir;
  auto* j = app.add_subcommand("jumps", "classify the jumps of a run");
  j->add_option("--out", jumps_dir, "run directory")->required();

  std::string verify_dir;
  VerifyOptions vopt;
  auto* v = app.add_subcommand("verify", "Ito reconstruction, Dyson drift and derivative checks");
  v->add_option("--out", verify_dir, "run directory")->required();
  v->add_option("--refine", vopt.refine, "refinement doublings below the stored grid");
  v->add_option("--dyson-paths", vopt.dyson_paths, "one-step paths for the drift estimate");
  v->add_option("--threads", vopt.threads, "worker threads (0: all cores)");

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    CommandResult r;
    if (*s) {
      if (sim.config_path.empty() == sim.manifest_path.empty()) {
        throw ConfigError("simulate needs exactly one of --config and --manifest");
      }
      if (*o_paths) sim.paths = paths;
      if (*o_steps) sim.steps = steps;
      if (*o_seed) sim.seed = seed;
      r = cmd_simulate(sim);
      std::cout << "wrote " << r.report["files"].size() << " files and manifest.json to " << sim.out_dir << "\n";
    } else if (*j) {
      r = cmd_jumps(jumps_dir);
      std::cout << "jump_count: " << r.report["jump_count"] << "\n"
                << "simultaneity_pass_rate: " << r.report["simultaneity_pass_rate"] << "\n"
                << "jumped_count_histogram: " << r.report["jumped_count_histogram"].dump() << "\n";
    } else {
      r = cmd_verify(verify_dir, vopt);
      for (const auto& row : r.report["refinement"]) {
        std::cout << "steps " << row["steps"] << "  median sup residual " << row["median_sup_residual"] << "\n";
      }
      std::cout << "passed: " << (r.passed ? "true" : "false") << "\n";
    }
    return r.passed ? kExitOk : kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermitian Levy process simulation and eigenvalue SDE verification"};
  return run(app, argc, argv);
}
