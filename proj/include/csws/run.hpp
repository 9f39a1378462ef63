// Command layer behind the csws executable: solve, bounds, backtest and
// plot-data. Each command returns a process exit code:
//   0 success, 2 config error, 3 artifact mismatch, 4 I/O error.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "csws/config.hpp"
#include "csws/duality.hpp"
#include "csws/stack_io.hpp"

namespace csws::cli {

struct CliOptions {
  std::string config_path;
  std::string out_dir;  // overrides the config output directory when set
  int threads = 0;      // 0 = auto; never changes any emitted byte
  std::optional<int> position;         // 1-based
  std::optional<int> time_index;       // 0-based decision epoch
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
};

int cmd_solve(const CliOptions& options);
int cmd_bounds(const CliOptions& options);
int cmd_backtest(const CliOptions& options);
int cmd_plot_data(const CliOptions& options);

// Building blocks shared with the test suites.

struct SolveOutput {
  ModelParts parts;
  FunctionStack stack;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
};

// build + validate + backward induction (no files touched).
SolveOutput run_solve(const RunConfig& config);

struct BoundsOutput {
  PathBundle paths;
  PathPolicy policy;
  MartingaleIncrements mart;
  BoundSample sample;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
};

// paths + policy + increments + per-path bound recursions.
BoundsOutput run_bounds(const RunConfig& config, const ModelParts& parts,
                        const FunctionStack& stack);

// CSV snapshots as written by the commands (also used to compare runs).
std::string bounds_csv(const BoundSample& sample, double alpha);
std::string backtest_csv(const BacktestResult& result);
std::string plot_csv(const Grid& grid, const TangentMatrix& value);

}  // namespace csws::cli
