#pragma once

#include <string>

#include <json.hpp>

#include "hlevy/levy_model.hpp"
#include "hlevy/path_synthesis.hpp"

namespace hlevy {

/// Parsed model file.
///
/// {
///   "dim": 2,
///   "gaussian": {"form": "gue", "sigma2": 1.0},
///   "jumps": {"family": "rank_one_uniform", "rate": 2.0,
///             "radial": {"law": "point_mass", "r0": 1.0}, "cutoff": 1e-3},
///   "drift": [0, 0, 0, 0],
///   "seed": 7,
///   "simulation": {"t_max": 1.0, "steps": 200, "paths": 10}
/// }
///
/// Matrices (frames, Kronecker factors) are nested arrays whose entries are
/// reals or [re, im] pairs. "drift" lists the d² real coordinates of Ψ:
/// x_11..x_dd, then (x_ij, y_ij) for i < j. It may also be the string
/// "compensate", which sets Ψ to the compensator of the (ε, 1] band so that
/// no drift is integrated.
struct ModelConfig {
  nlohmann::json source;
  LevyTriplet triplet;
  SimulationConfig sim;

  /// Canonical one-line echo written into every output header.
  std::string echo() const { return source.dump(); }
};

/// Throws ConfigError with the offending key path (and line for syntax errors).
ModelConfig parse_model_config(const std::string& text);
ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::string& path);

}  // namespace hlevy
