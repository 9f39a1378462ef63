// Pathwise primal-dual bound machinery: additive-dual martingale
// increments from nested subsimulation, per-path backward recursions, and
// confidence intervals for the time-0 value.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <vector>

#include "csws/envelope.hpp"
#include "csws/policy.hpp"
#include "csws/sampling.hpp"
#include "csws/types.hpp"

namespace csws {

// Entry (i, t, p) approximates
//   v_{t+1}(p, Z^i_{t+1}) - E[ v_{t+1}(p, W Z^i_t) | Z^i_t ],
// mean zero under the true path law.
class MartingaleIncrements {
 public:
  MartingaleIncrements(int n_path, int n_steps, int n_pos)
      : n_path_(n_path), n_steps_(n_steps), n_pos_(n_pos),
        phi_(static_cast<std::size_t>(n_path) * n_steps * n_pos) {}

  int n_path() const { return n_path_; }
  int n_steps() const { return n_steps_; }
  int n_pos() const { return n_pos_; }

  double at(int i, int t, int p) const {
    return phi_[(static_cast<std::size_t>(i) * n_steps_ + t) * n_pos_ + p];
  }
  double& at(int i, int t, int p) {
    return phi_[(static_cast<std::size_t>(i) * n_steps_ + t) * n_pos_ + p];
  }

 private:
  int n_path_, n_steps_, n_pos_;
  std::vector<double> phi_;
};

// Interior epochs evaluate the PWL value functions (neighbour-accelerated);
// the terminal epoch uses the exact scrap oracle.
MartingaleIncrements mart_increments(const PathBundle& paths,
                                     const SubsimBundle& subsim,
                                     const Grid& grid,
                                     const FunctionStack& stack,
                                     const RewardOracle& scrap_oracle,
                                     const NeighborIndex& index, int k_nn);

// Per-path, per-position time-0 values whose means bracket v_0.
struct BoundSample {
  Mat primal;  // n_path x P, candidate-policy values (lower)
  Mat dual;    // n_path x P, max-recursion values (upper)
};

// Backward recursions over each path: the dual takes the max over actions
// of reward plus transition-weighted (next dual - increment); the primal
// fixes the prescribed policy action.
BoundSample dual_bounds(const PathBundle& paths, const ControlSpec& control,
                        const RewardOracle& oracle, const PathPolicy& policy,
                        const MartingaleIncrements& mart);

struct BoundInterval {
  double low = 0.0;   // mean primal - q se(primal)
  double high = 0.0;  // mean dual + q se(dual)
  double mean_primal = 0.0;
  double mean_dual = 0.0;
  double se_primal = 0.0;
  double se_dual = 0.0;
  int n_path = 0;
};

// (1 - alpha) two-sided interval for position p; q is the standard normal
// quantile at 1 - alpha/2 and se the sample standard error.
BoundInterval get_bounds(const BoundSample& sample, double alpha, int p);

}  // namespace csws
