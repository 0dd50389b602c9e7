#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hlevy/model_config.hpp"

namespace hlevy {

inline constexpr const char* kCodeVersion = "hlevy 1.0.0";

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitNumerical = 4,
};

struct SimulateOptions {
  std::string config_path;    // model file, or
  std::string manifest_path;  // an earlier manifest to reproduce
  std::string out_dir;
  std::optional<int> paths;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: hardware concurrency
};

struct CommandResult {
  nlohmann::json report;
  bool passed = true;
};

/// Config with command-line overrides folded into the JSON, so the echo
/// records the settings actually used.
ModelConfig effective_config(const ModelConfig& base, std::optional<int> paths, std::optional<int> steps,
                             std::optional<std::uint64_t> seed);

/// Writes path_NNNN.csv and eigen_NNNN.csv per path, then manifest.json.
CommandResult cmd_simulate(const SimulateOptions& opt);

/// Classifies every jump in a run; writes jumps.jsonl and jump_summary.json.
CommandResult cmd_jumps(const std::string& run_dir);

struct VerifyOptions {
  int refine = 2;             // strides 2^refine, ..., 2, 1 on the stored grid
  int dyson_paths = 100000;
  int fd_matrices = 10;       // per dimension
  int threads = 0;
};

/// Reconstruction tables across refinement levels, the Dyson drift table and
/// a Hadamard finite-difference report; writes verify.json. `passed` is false
/// when a validation guard trips.
CommandResult cmd_verify(const std::string& run_dir, const VerifyOptions& opt);

}  // namespace hlevy
