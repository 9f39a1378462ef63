// Candidate policy extraction along simulated paths, and full policy
// backtesting with exact rewards.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "csws/envelope.hpp"
#include "csws/sampling.hpp"
#include "csws/types.hpp"

namespace csws {

// Prescribed action at each path state for every hypothetical position, so
// one extraction serves backtests from any start position.
class PathPolicy {
 public:
  PathPolicy(int n_path, int n_steps, int n_pos)
      : n_path_(n_path), n_steps_(n_steps), n_pos_(n_pos),
        actions_(static_cast<std::size_t>(n_path) * n_steps * n_pos) {}

  int n_path() const { return n_path_; }
  int n_steps() const { return n_steps_; }
  int n_pos() const { return n_pos_; }

  std::int32_t action(int i, int t, int p) const {
    return actions_[(static_cast<std::size_t>(i) * n_steps_ + t) * n_pos_ + p];
  }
  std::int32_t& action(int i, int t, int p) {
    return actions_[(static_cast<std::size_t>(i) * n_steps_ + t) * n_pos_ + p];
  }

 private:
  int n_path_, n_steps_, n_pos_;
  std::vector<std::int32_t> actions_;
};

// actions[i][t][p] = smallest action maximizing
//   oracle(t, p, a, z^i_t) + sum_p' alpha^a_{p,p'} expected[t][p'](z^i_t).
PathPolicy path_policy(const PathBundle& paths, const Grid& grid,
                       const ControlSpec& control, const RewardOracle& oracle,
                       const FunctionStack& stack, const NeighborIndex& index,
                       int k_nn);

struct BacktestResult {
  Vec values;                // cumulated exact rewards incl. scrap, per path
  Eigen::MatrixXi positions; // n_path x n_dec, 0-based positions
  Eigen::MatrixXi actions;   // n_path x (n_dec-1), 0-based actions

  // First epoch t whose position is 0-based position 0, minus one step:
  // the decision epoch at which the transition was triggered; n_steps when
  // the path never reaches position 0.
  int first_exercise_epoch(int i) const;
};

// Runs the prescribed policy from start_pos; stochastic position moves are
// sampled from the seeded counter stream.
BacktestResult backtest(int start_pos, const PathBundle& paths,
                        const ControlSpec& control, const RewardOracle& oracle,
                        const PathPolicy& policy, std::uint64_t seed);

}  // namespace csws
