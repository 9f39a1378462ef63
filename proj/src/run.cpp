#include "csws/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "csws/bellman.hpp"
#include "csws/parallel.hpp"

namespace csws::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point wall = std::chrono::steady_clock::now();
  std::clock_t cpu = std::clock();

  double wall_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall)
        .count();
  }
  double cpu_seconds() const {
    return static_cast<double>(std::clock() - cpu) / CLOCKS_PER_SEC;
  }
};

RunConfig effective_config(const CliOptions& options) {
  RunConfig config = load_config(options.config_path);
  if (!options.out_dir.empty()) config.output = options.out_dir;
  if (options.seed) config.bounds.seed = *options.seed;
  if (options.alpha) {
    if (!(*options.alpha > 0.0 && *options.alpha < 1.0)) {
      throw ConfigError("--alpha: must lie in (0, 1)");
    }
    config.bounds.alpha = *options.alpha;
  }
  if (options.position) config.bounds.position = *options.position;
  return config;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

nlohmann::json manifest_base(const RunConfig& config) {
  nlohmann::json j;
  j["config"] = to_json(config);
  j["threads"] = max_threads();
  return j;
}

int resolve_k_nn(const RunConfig& config, const Grid& grid) {
  const int k = std::min(config.solver.k_nn, grid.size());
  return k;
}

// 1-based reporting position, defaulting to the template's natural one.
int report_position(const RunConfig& config, const ModelParts& parts) {
  const int p1 = config.bounds.position.value_or(parts.default_position + 1);
  const int n_pos = parts.control.n_pos();
  if (p1 < 1 || p1 > n_pos) {
    throw ConfigError("position: must lie in [1, " + std::to_string(n_pos) + "]");
  }
  return p1;
}

void check_artifact_shape(const FunctionStack& stack, const ModelParts& parts,
                          int n_dec, const std::string& path) {
  if (stack.n_dec() != n_dec || stack.n_pos() != parts.control.n_pos() ||
      stack.value[0][0].count() != parts.grid.size() ||
      stack.value[0][0].dim() != parts.grid.dim()) {
    throw ArtifactError(path + ": artifact shape does not match the config");
  }
  if (static_cast<int>(stack.expected.size()) != n_dec - 1) {
    throw ArtifactError(path + ": artifact lacks the expected-value stack");
  }
}

int model_n_dec(const RunConfig& config) {
  if (const auto* put = std::get_if<BermudanPutParams>(&config.model)) {
    return put->n_dec;
  }
  return std::get<SwingParams>(config.model).n_dec;
}

int run_guarded(const CliOptions& options, int (*body)(const CliOptions&)) {
  try {
    set_max_threads(options.threads);
    return body(options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

SolveOutput run_solve(const RunConfig& config) {
  Timer timer;
  SolveOutput out{build_template(config.model, config.solver.n_cells), {}, 0, 0};
  const auto violations =
      validate_model(out.parts.grid, out.parts.control, out.parts.disturbances,
                     out.parts.rewards);
  if (!violations.empty()) {
    throw ConfigError("model validation failed: " + violations[0].describe());
  }
  const NeighborIndex index(out.parts.grid);
  out.stack = backward_induction(out.parts.grid, out.parts.control,
                                 out.parts.rewards, out.parts.disturbances,
                                 index, resolve_k_nn(config, out.parts.grid));
  out.wall_seconds = timer.wall_seconds();
  out.cpu_seconds = timer.cpu_seconds();
  return out;
}

BoundsOutput run_bounds(const RunConfig& config, const ModelParts& parts,
                        const FunctionStack& stack) {
  Timer timer;
  const int n_dec = stack.n_dec();
  PathBundle paths =
      gen_paths(parts.start, parts.path_spec, config.bounds.n_path, n_dec,
                config.bounds.seed, config.bounds.antithetic);
  const NeighborIndex index(parts.grid);
  const int k_nn = resolve_k_nn(config, parts.grid);
  PathPolicy policy = path_policy(paths, parts.grid, parts.control,
                                  parts.oracle, stack, index, k_nn);
  const SubsimBundle subsim =
      gen_subsim(parts.path_spec, config.bounds.n_subsim, config.bounds.n_path,
                 n_dec, config.bounds.seed, config.bounds.antithetic);
  MartingaleIncrements mart =
      mart_increments(paths, subsim, parts.grid, stack, parts.oracle, index, k_nn);
  BoundSample sample = dual_bounds(paths, parts.control, parts.oracle, policy, mart);
  BoundsOutput out{std::move(paths), std::move(policy), std::move(mart),
                   std::move(sample), 0, 0};
  out.wall_seconds = timer.wall_seconds();
  out.cpu_seconds = timer.cpu_seconds();
  return out;
}

std::string bounds_csv(const BoundSample& sample, double alpha) {
  std::string csv =
      "position,n_path,mean_primal,se_primal,mean_dual,se_dual,low,high,alpha\n";
  for (int p = 0; p < sample.primal.cols(); ++p) {
    const BoundInterval bi = get_bounds(sample, alpha, p);
    csv += std::to_string(p + 1) + "," + std::to_string(bi.n_path) + "," +
           fmt(bi.mean_primal) + "," + fmt(bi.se_primal) + "," +
           fmt(bi.mean_dual) + "," + fmt(bi.se_dual) + "," + fmt(bi.low) + "," +
           fmt(bi.high) + "," + fmt(alpha) + "\n";
  }
  return csv;
}

namespace {

double quantile_type7(std::vector<double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * (static_cast<double>(n) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace

std::string backtest_csv(const BacktestResult& result) {
  const int n = static_cast<int>(result.values.size());
  std::string csv = "path,value,exercise_epoch,terminal_position\n";
  std::vector<double> values(n), epochs(n);
  for (int i = 0; i < n; ++i) {
    const int epoch = result.first_exercise_epoch(i);
    values[i] = result.values[i];
    epochs[i] = epoch;
    csv += std::to_string(i) + "," + fmt(result.values[i]) + "," +
           std::to_string(epoch) + "," +
           std::to_string(result.positions(i, result.positions.cols() - 1) + 1) +
           "\n";
  }
  // Summary block: statistic name in the path column.
  auto mean_of = [n](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / n;
  };
  auto sd_of = [n, &mean_of](const std::vector<double>& x) {
    if (n < 2) return 0.0;
    const double mu = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / (n - 1));
  };
  std::vector<double> sv = values, se = epochs;
  std::sort(sv.begin(), sv.end());
  std::sort(se.begin(), se.end());
  csv += "mean," + fmt(mean_of(values)) + "," + fmt(mean_of(epochs)) + ",\n";
  csv += "sd," + fmt(sd_of(values)) + "," + fmt(sd_of(epochs)) + ",\n";
  for (const double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    char name[8];
    std::snprintf(name, sizeof(name), "q%02d", static_cast<int>(q * 100 + 0.5));
    csv += std::string(name) + "," + fmt(quantile_type7(sv, q)) + "," +
           fmt(quantile_type7(se, q)) + ",\n";
  }
  return csv;
}

std::string plot_csv(const Grid& grid, const TangentMatrix& value) {
  std::string csv = "coordinate,value\n";
  Vec z(grid.dim());
  for (int i = 0; i < grid.size(); ++i) {
    for (int c = 0; c < grid.dim(); ++c) z[c] = grid.points(i, c);
    const double v = evaluate(value, z).value;
    csv += fmt(grid.points(i, grid.dim() > 1 ? 1 : 0)) + "," + fmt(v) + "\n";
  }
  return csv;
}

namespace {

int solve_body(const CliOptions& options) {
  const RunConfig config = effective_config(options);
  const SolveOutput out = run_solve(config);
  ensure_dir(config.output);
  write_stack(config.output + "/stack.bin", out.stack);

  nlohmann::json manifest = manifest_base(config);
  manifest["wall_seconds"] = out.wall_seconds;
  manifest["cpu_seconds"] = out.cpu_seconds;
  manifest["k_nn"] = resolve_k_nn(config, out.parts.grid);
  manifest["dims"] = {{"n_dec", out.stack.n_dec()},
                      {"n_pos", out.stack.n_pos()},
                      {"m", out.parts.grid.size()},
                      {"d", out.parts.grid.dim()}};
  write_text(config.output + "/solve_manifest.json", manifest.dump(2) + "\n");

  std::cout << "solve: " << template_name(config.model) << " n_dec "
            << out.stack.n_dec() << ", positions " << out.stack.n_pos()
            << ", grid " << out.parts.grid.size() << "x"
            << out.parts.grid.dim() << ", k_nn "
            << resolve_k_nn(config, out.parts.grid) << ", wall "
            << fmt6(out.wall_seconds) << "s, cpu " << fmt6(out.cpu_seconds)
            << "s\n";
  std::cout << "wrote " << config.output << "/stack.bin\n";
  return 0;
}

// Shared load-and-check for the artifact-consuming commands.
struct LoadedRun {
  RunConfig config;
  ModelParts parts;
  FunctionStack stack;
};

LoadedRun load_run(const CliOptions& options) {
  RunConfig config = effective_config(options);
  ModelParts parts = build_template(config.model, config.solver.n_cells);
  const std::string path = config.output + "/stack.bin";
  FunctionStack stack = read_stack(path);
  check_artifact_shape(stack, parts, model_n_dec(config), path);
  return {std::move(config), std::move(parts), std::move(stack)};
}

int bounds_body(const CliOptions& options) {
  LoadedRun run = load_run(options);
  const int p1 = report_position(run.config, run.parts);
  const BoundsOutput out = run_bounds(run.config, run.parts, run.stack);

  const std::string csv = bounds_csv(out.sample, run.config.bounds.alpha);
  write_text(run.config.output + "/bounds.csv", csv);
  nlohmann::json manifest = manifest_base(run.config);
  manifest["wall_seconds"] = out.wall_seconds;
  manifest["cpu_seconds"] = out.cpu_seconds;
  write_text(run.config.output + "/bounds_manifest.json", manifest.dump(2) + "\n");

  const BoundInterval bi =
      get_bounds(out.sample, run.config.bounds.alpha, p1 - 1);
  std::cout << "position " << p1 << ": "
            << fmt6((1.0 - run.config.bounds.alpha) * 100) << "% interval ["
            << fmt6(bi.low) << ", " << fmt6(bi.high) << "], primal "
            << fmt6(bi.mean_primal) << " (se " << fmt6(bi.se_primal)
            << "), dual " << fmt6(bi.mean_dual) << " (se " << fmt6(bi.se_dual)
            << "), n_path " << bi.n_path << "\n";
  std::cout << "wrote " << run.config.output << "/bounds.csv\n";
  return 0;
}

int backtest_body(const CliOptions& options) {
  LoadedRun run = load_run(options);
  const int p1 = report_position(run.config, run.parts);
  Timer timer;
  PathBundle paths = gen_paths(run.parts.start, run.parts.path_spec,
                               run.config.bounds.n_path, run.stack.n_dec(),
                               run.config.bounds.seed,
                               run.config.bounds.antithetic);
  const NeighborIndex index(run.parts.grid);
  const PathPolicy policy =
      path_policy(paths, run.parts.grid, run.parts.control, run.parts.oracle,
                  run.stack, index, resolve_k_nn(run.config, run.parts.grid));
  const BacktestResult result =
      backtest(p1 - 1, paths, run.parts.control, run.parts.oracle, policy,
               run.config.bounds.seed);

  write_text(run.config.output + "/backtest.csv", backtest_csv(result));
  nlohmann::json manifest = manifest_base(run.config);
  manifest["wall_seconds"] = timer.wall_seconds();
  manifest["cpu_seconds"] = timer.cpu_seconds();
  manifest["start_position"] = p1;
  write_text(run.config.output + "/backtest_manifest.json",
             manifest.dump(2) + "\n");

  double mean = 0.0;
  for (int i = 0; i < result.values.size(); ++i) mean += result.values[i];
  mean /= static_cast<double>(result.values.size());
  std::cout << "backtest: start position " << p1 << ", mean value "
            << fmt6(mean) << ", paths " << result.values.size() << "\n";
  std::cout << "wrote " << run.config.output << "/backtest.csv\n";
  return 0;
}

int plot_body(const CliOptions& options) {
  LoadedRun run = load_run(options);
  const int p1 = report_position(run.config, run.parts);
  const int t = options.time_index.value_or(0);
  if (t < 0 || t >= run.stack.n_dec()) {
    throw ConfigError("--time: must lie in [0, " +
                      std::to_string(run.stack.n_dec() - 1) + "]");
  }
  const std::string csv =
      plot_csv(run.parts.grid, run.stack.value[t][p1 - 1]);
  const std::string path = run.config.output + "/plot_t" + std::to_string(t) +
                           "_p" + std::to_string(p1) + ".csv";
  write_text(path, csv);
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int cmd_solve(const CliOptions& options) {
  return run_guarded(options, solve_body);
}
int cmd_bounds(const CliOptions& options) {
  return run_guarded(options, bounds_body);
}
int cmd_backtest(const CliOptions& options) {
  return run_guarded(options, backtest_body);
}
int cmd_plot_data(const CliOptions& options) {
  return run_guarded(options, plot_body);
}

}  // namespace csws::cli
