#include "csws/policy.hpp"

#include <algorithm>
#include <stdexcept>

#include "csws/parallel.hpp"
#include "csws/rng.hpp"

namespace csws {

PathPolicy path_policy(const PathBundle& paths, const Grid& grid,
                       const ControlSpec& control, const RewardOracle& oracle,
                       const FunctionStack& stack, const NeighborIndex& index,
                       int k_nn) {
  const int n_steps = paths.n_dec() - 1;
  const int n_pos = control.n_pos();
  const int n_action = control.n_action();
  if (static_cast<int>(stack.expected.size()) != n_steps) {
    throw std::invalid_argument("path_policy: expected stack covers every step");
  }
  if (stack.n_pos() != n_pos) {
    throw std::invalid_argument("path_policy: stack position count mismatch");
  }
  if (paths.dim() != grid.dim()) {
    throw std::invalid_argument("path_policy: path dimension mismatch");
  }
  if (k_nn < 1 || k_nn > grid.size()) {
    throw std::invalid_argument("path_policy: k_nn must lie in [1, m]");
  }

  PathPolicy policy(paths.n_path(), n_steps, n_pos);
  parallel_for(paths.n_path(), [&](std::int64_t ip) {
    const int i = static_cast<int>(ip);
    Vec z(paths.dim());
    std::vector<double> continuation(n_pos);
    for (int t = 0; t < n_steps; ++t) {
      for (int c = 0; c < paths.dim(); ++c) z[c] = paths.state(i, t)[c];
      for (int p = 0; p < n_pos; ++p) {
        continuation[p] = evaluate_nn(stack.expected[t][p], z, index, k_nn).value;
      }
      for (int p = 0; p < n_pos; ++p) {
        double best = 0.0;
        int best_action = -1;
        for (int a = 0; a < n_action; ++a) {
          double cand = oracle.reward(t, p, a, z);
          if (control.is_deterministic()) {
            cand += continuation[control.target(p, a)];
          } else {
            for (int pp = 0; pp < n_pos; ++pp) {
              const double w = control.prob(p, a, pp);
              if (w != 0.0) cand += w * continuation[pp];
            }
          }
          if (best_action < 0 || cand > best) {
            best = cand;
            best_action = a;
          }
        }
        policy.action(i, t, p) = best_action;
      }
    }
  });
  return policy;
}

int BacktestResult::first_exercise_epoch(int i) const {
  for (int t = 0; t < positions.cols(); ++t) {
    if (positions(i, t) == 0) return std::max(t - 1, 0);
  }
  return static_cast<int>(positions.cols()) - 1;
}

BacktestResult backtest(int start_pos, const PathBundle& paths,
                        const ControlSpec& control, const RewardOracle& oracle,
                        const PathPolicy& policy, std::uint64_t seed) {
  const int n_pos = control.n_pos();
  if (start_pos < 0 || start_pos >= n_pos) {
    throw std::invalid_argument("backtest: start position out of range");
  }
  const int n_steps = paths.n_dec() - 1;
  if (policy.n_path() != paths.n_path() || policy.n_steps() != n_steps ||
      policy.n_pos() != n_pos) {
    throw std::invalid_argument("backtest: policy shape mismatch");
  }

  BacktestResult result;
  result.values.setZero(paths.n_path());
  result.positions.setZero(paths.n_path(), paths.n_dec());
  result.actions.setZero(paths.n_path(), n_steps);
  parallel_for(paths.n_path(), [&](std::int64_t ip) {
    const int i = static_cast<int>(ip);
    Vec z(paths.dim());
    int p = start_pos;
    double total = 0.0;
    result.positions(i, 0) = p;
    for (int t = 0; t < n_steps; ++t) {
      for (int c = 0; c < paths.dim(); ++c) z[c] = paths.state(i, t)[c];
      const int a = policy.action(i, t, p);
      result.actions(i, t) = a;
      total += oracle.reward(t, p, a, z);
      if (control.is_deterministic()) {
        p = control.target(p, a);
      } else {
        // Inverse-CDF sample over successor positions.
        const double u = rng::uniform01(seed, rng::kPosition,
                                        static_cast<std::uint32_t>(i),
                                        static_cast<std::uint32_t>(t));
        double acc = 0.0;
        int next = n_pos - 1;
        for (int pp = 0; pp < n_pos; ++pp) {
          acc += control.prob(p, a, pp);
          if (u <= acc) {
            next = pp;
            break;
          }
        }
        p = next;
      }
      result.positions(i, t + 1) = p;
    }
    for (int c = 0; c < paths.dim(); ++c) z[c] = paths.state(i, n_steps)[c];
    total += oracle.scrap(p, z);
    result.values[i] = total;
  });
  return result;
}

}  // namespace csws
