// JSON run configuration: model template parameters, solver settings and
// bound-estimation settings. Positions are 1-based in the file, 0-based in
// code.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "csws/templates.hpp"

namespace csws {

// Exit-code-bearing error classes for the command layer.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  int n_cells = 1000;  // partition size for disturbance quantization
  int k_nn = 20;       // nearest-neighbour candidates; m for the exact operator
};

struct BoundsConfig {
  int n_path = 500;
  int n_subsim = 500;
  std::uint64_t seed = 12345;
  double alpha = 0.01;
  bool antithetic = true;
  std::optional<int> position;  // 1-based reporting position
};

struct RunConfig {
  ModelTemplate model;
  SolverConfig solver;
  BoundsConfig bounds;
  std::string output = "runs/out";
};

// Both throw ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace csws
