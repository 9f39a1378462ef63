// csws — solve convex switching systems, certify with primal-dual bounds.
////////////////////////////////////////////////////////////////////////////////
#include <CLI11.hpp>

#include "csws/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Convex switching system solver with pathwise primal-dual bounds"};
  app.require_subcommand(1);

  csws::cli::CliOptions options;
  int position = 0;
  int time_index = -1;
  double alpha = -1.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_time) {
    sub->add_option("--config", options.config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--out", options.out_dir,
                    "output directory (overrides the config)");
    sub->add_option("--threads", options.threads,
                    "worker threads, 0 = auto (never changes results)");
    sub->add_option("--position", position, "1-based position to report");
    sub->add_option("--alpha", alpha, "confidence level for intervals");
    sub->add_option("--seed", seed, "seed override for paths and subsims");
    if (with_time) {
      sub->add_option("--time", time_index, "0-based decision epoch");
    }
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "approximate the value functions by backward induction");
  CLI::App* bounds = app.add_subcommand(
      "bounds", "estimate the primal-dual confidence interval at time 0");
  CLI::App* backtest = app.add_subcommand(
      "backtest", "run the prescribed policy over simulated scenarios");
  CLI::App* plot = app.add_subcommand(
      "plot-data", "emit (coordinate, value) rows of a value function");
  add_common(solve, false);
  add_common(bounds, false);
  add_common(backtest, false);
  add_common(plot, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  for (const CLI::App* sub : {solve, bounds, backtest, plot}) {
    if (sub->count("--position")) options.position = position;
    if (sub->count("--alpha")) options.alpha = alpha;
    if (sub->count("--seed")) options.seed = seed;
    if (sub == plot && sub->count("--time")) options.time_index = time_index;
  }

  if (solve->parsed()) return csws::cli::cmd_solve(options);
  if (bounds->parsed()) return csws::cli::cmd_bounds(options);
  if (backtest->parsed()) return csws::cli::cmd_backtest(options);
  return csws::cli::cmd_plot_data(options);
}
