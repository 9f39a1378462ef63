#include <doctest.h>

#include <cmath>

#include "csws/bellman.hpp"
#include "csws/policy.hpp"
#include "csws/templates.hpp"
#include "oracles.hpp"

using namespace csws;

namespace {

struct SolvedPut {
  BermudanPutParams params;
  ModelParts parts;
  FunctionStack stack;

  SolvedPut() : params{}, parts(build_put_template(params, 1000)) {
    const NeighborIndex index(parts.grid);
    stack = backward_induction(parts.grid, parts.control, parts.rewards,
                               parts.disturbances, index, 20);
  }
};

const SolvedPut& solved_put() {
  static const SolvedPut solved;
  return solved;
}

}  // namespace

TEST_CASE("single-action systems always prescribe that action") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(3, 2);
  grid.points << 1.0, 0.0, 1.0, 0.5, 1.0, 1.0;
  const NeighborIndex index(grid);
  Eigen::MatrixXi targets(1, 1);
  targets << 0;
  const ControlSpec control = ControlSpec::deterministic(targets);
  RewardOracle oracle;
  oracle.reward = [](int, int, int, const Vec&) { return 1.0; };
  oracle.scrap = [](int, const Vec&) { return 0.0; };

  FunctionStack stack;
  TangentMatrix zero;
  zero.rows.setZero(3, 2);
  stack.value = {{zero}, {zero}, {zero}};
  stack.expected = {{zero}, {zero}};

  RandomEntrySpec spec;
  spec.constant = Mat::Identity(2, 2);
  Vec start(2);
  start << 1.0, 0.5;
  const PathBundle paths = gen_paths(start, spec, 3, 3, 1, false);
  const PathPolicy policy =
      path_policy(paths, grid, control, oracle, stack, index, 3);
  for (int i = 0; i < 3; ++i) {
    for (int t = 0; t < 2; ++t) CHECK(policy.action(i, t, 0) == 0);
  }
}

TEST_CASE("deep out-of-the-money put states continue") {
  const SolvedPut& solved = solved_put();
  RandomEntrySpec frozen;  // deterministic paths pinned at price 60
  frozen.constant = Mat::Identity(2, 2);
  Vec start(2);
  start << 1.0, 60.0;
  const PathBundle paths =
      gen_paths(start, frozen, 2, solved.params.n_dec, 9, false);
  const NeighborIndex index(solved.parts.grid);
  const PathPolicy policy = path_policy(paths, solved.parts.grid,
                                        solved.parts.control, solved.parts.oracle,
                                        solved.stack, index, 20);
  // Continuation value is strictly positive at 60, exercise pays zero.
  for (int t = 0; t + 1 < solved.params.n_dec - 1; ++t) {
    CHECK(policy.action(0, t, 1) == 0);
  }
}

TEST_CASE("deep in-the-money put exercises at the last decision epoch") {
  const SolvedPut& solved = solved_put();
  RandomEntrySpec frozen;
  frozen.constant = Mat::Identity(2, 2);
  Vec start(2);
  start << 1.0, 30.0;
  const PathBundle paths =
      gen_paths(start, frozen, 2, solved.params.n_dec, 9, false);
  const NeighborIndex index(solved.parts.grid);
  const PathPolicy policy = path_policy(paths, solved.parts.grid,
                                        solved.parts.control, solved.parts.oracle,
                                        solved.stack, index, 20);
  const int t_last = solved.params.n_dec - 2;
  CHECK(policy.action(0, t_last, 1) == 1);

  // Direct one-step check: immediate discounted 10 beats the atom average
  // of the scrap payoff.
  const double exercise = std::exp(-0.06 * 0.02 * t_last) * 10.0;
  double continuation = 0.0;
  const DisturbanceSet& ds = solved.parts.disturbances[0];
  Vec y(2);
  for (int k = 0; k < ds.count(); ++k) {
    y << 1.0, ds.matrices[k](1, 1) * 30.0;
    continuation += ds.weights[k] * solved.parts.oracle.scrap(1, y);
  }
  CHECK(exercise > continuation);
}

TEST_CASE("exercise-immediately policy pays the undiscounted intrinsic value") {
  const SolvedPut& solved = solved_put();
  const PathBundle paths = gen_paths(solved.parts.start, solved.parts.path_spec,
                                     10, solved.params.n_dec, 4, true);
  PathPolicy exercise_now(10, solved.params.n_dec - 1, 2);
  for (int i = 0; i < 10; ++i) {
    for (int t = 0; t < solved.params.n_dec - 1; ++t) {
      exercise_now.action(i, t, 0) = 0;
      exercise_now.action(i, t, 1) = 1;  // exercise whenever possible
    }
  }
  const BacktestResult result =
      backtest(1, paths, solved.parts.control, solved.parts.oracle,
               exercise_now, 4);
  for (int i = 0; i < 10; ++i) {
    CHECK(result.values[i] == doctest::Approx(4.0));
    CHECK(result.first_exercise_epoch(i) == 0);
    for (int t = 1; t < solved.params.n_dec; ++t) {
      CHECK(result.positions(i, t) == 0);
    }
  }
}

TEST_CASE("zero oracle backtests to zero values") {
  const SolvedPut& solved = solved_put();
  const PathBundle paths = gen_paths(solved.parts.start, solved.parts.path_spec,
                                     6, solved.params.n_dec, 4, true);
  RewardOracle zero;
  zero.reward = [](int, int, int, const Vec&) { return 0.0; };
  zero.scrap = [](int, const Vec&) { return 0.0; };
  PathPolicy hold(6, solved.params.n_dec - 1, 2);
  for (int i = 0; i < 6; ++i) {
    for (int t = 0; t < solved.params.n_dec - 1; ++t) {
      hold.action(i, t, 0) = 0;
      hold.action(i, t, 1) = 0;
    }
  }
  const BacktestResult result =
      backtest(1, paths, solved.parts.control, zero, hold, 4);
  CHECK(result.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(result.first_exercise_epoch(0) == solved.params.n_dec - 1);
}

TEST_CASE("solved-policy backtest mean sits near the candidate value") {
  const SolvedPut& solved = solved_put();
  const int n_path = 500;
  const PathBundle paths =
      gen_paths(solved.parts.start, solved.parts.path_spec, n_path,
                solved.params.n_dec, 12345, true);
  const NeighborIndex index(solved.parts.grid);
  const PathPolicy policy = path_policy(paths, solved.parts.grid,
                                        solved.parts.control, solved.parts.oracle,
                                        solved.stack, index, 20);
  const BacktestResult result = backtest(
      1, paths, solved.parts.control, solved.parts.oracle, policy, 12345);
  std::vector<double> values(n_path);
  for (int i = 0; i < n_path; ++i) values[i] = result.values[i];
  const double mean = oracles::mean_of(values);
  const double se = oracles::sd_of(values) / std::sqrt(double(n_path));
  // The candidate policy value is close to the solver's 4.478 estimate.
  CHECK(std::abs(mean - 4.478) <= 3.0 * se + 0.02);
  // Exercise epochs live in {0..T}.
  for (int i = 0; i < n_path; ++i) {
    const int epoch = result.first_exercise_epoch(i);
    CHECK(epoch >= 0);
    CHECK(epoch <= solved.params.n_dec - 1);
  }
}

TEST_CASE("stochastic transitions are sampled reproducibly") {
  // Two positions, one action, an even split from position 0.
  std::vector<Mat> probs(2, Mat::Zero(1, 2));
  probs[0] << 0.5, 0.5;
  probs[1] << 0.0, 1.0;
  const ControlSpec control = ControlSpec::stochastic(probs);
  RewardOracle oracle;
  oracle.reward = [](int, int, int, const Vec&) { return 0.0; };
  oracle.scrap = [](int p, const Vec&) { return static_cast<double>(p); };

  RandomEntrySpec spec;
  spec.constant = Mat::Identity(2, 2);
  Vec start(2);
  start << 1.0, 0.0;
  const int n_path = 2000;
  const PathBundle paths = gen_paths(start, spec, n_path, 2, 3, false);
  PathPolicy only(n_path, 1, 2);
  const BacktestResult a = backtest(0, paths, control, oracle, only, 77);
  const BacktestResult b = backtest(0, paths, control, oracle, only, 77);
  CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() == 0);
  // Roughly half the paths should land in position 1.
  const double frac = a.values.sum() / n_path;
  CHECK(frac > 0.45);
  CHECK(frac < 0.55);
}

TEST_CASE("invalid start positions are rejected") {
  const SolvedPut& solved = solved_put();
  const PathBundle paths = gen_paths(solved.parts.start, solved.parts.path_spec,
                                     2, solved.params.n_dec, 4, true);
  PathPolicy policy(2, solved.params.n_dec - 1, 2);
  CHECK_THROWS_AS(backtest(2, paths, solved.parts.control, solved.parts.oracle,
                           policy, 4),
                  std::invalid_argument);
}
