#include "csws/bellman.hpp"

#include <stdexcept>

#include "csws/parallel.hpp"

namespace csws {

namespace {

void check_step_args(const std::vector<TangentMatrix>& next_value,
                     const Grid& grid, const ControlSpec& control,
                     const std::vector<std::vector<TangentMatrix>>& reward_t) {
  const int n_pos = control.n_pos();
  if (static_cast<int>(next_value.size()) != n_pos) {
    throw std::invalid_argument("double_modified_step: one value per position");
  }
  if (static_cast<int>(reward_t.size()) != n_pos) {
    throw std::invalid_argument("double_modified_step: reward shape mismatch");
  }
  for (int p = 0; p < n_pos; ++p) {
    if (next_value[p].count() != grid.size() ||
        next_value[p].dim() != grid.dim()) {
      throw std::invalid_argument("double_modified_step: value shape mismatch");
    }
    if (static_cast<int>(reward_t[p].size()) != control.n_action()) {
      throw std::invalid_argument("double_modified_step: reward shape mismatch");
    }
    for (int a = 0; a < control.n_action(); ++a) {
      if (reward_t[p][a].count() != grid.size() ||
          reward_t[p][a].dim() != grid.dim()) {
        throw std::invalid_argument(
            "double_modified_step: reward shape mismatch");
      }
    }
  }
}

StepResult step_impl(const std::vector<TangentMatrix>& next_value,
                     const Grid& grid, const ControlSpec& control,
                     const DisturbanceSet& disturb,
                     const std::vector<std::vector<TangentMatrix>>& reward_t,
                     const CandidateTable& candidates) {
  const int m = grid.size();
  const int d = grid.dim();
  const int n_pos = control.n_pos();
  const int n_action = control.n_action();

  StepResult out;
  out.expected.resize(n_pos);
  for (int p = 0; p < n_pos; ++p) {
    out.expected[p] = expected_pwl(next_value[p], grid, disturb, candidates);
  }

  // Evaluate every expected function at every anchor once; the bellman max
  // below reuses value and argmax row.
  std::vector<EvalResult> expected_at(static_cast<std::size_t>(n_pos) * m);
  parallel_for(static_cast<std::int64_t>(n_pos) * m, [&](std::int64_t idx) {
    const int p = static_cast<int>(idx / m);
    const int i = static_cast<int>(idx % m);
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;
    expected_at[idx] = evaluate(out.expected[p], gi);
  });

  out.value.assign(n_pos, TangentMatrix{});
  for (int p = 0; p < n_pos; ++p) out.value[p].rows.setZero(m, d);

  parallel_for(static_cast<std::int64_t>(n_pos) * m, [&](std::int64_t idx) {
    const int p = static_cast<int>(idx / m);
    const int i = static_cast<int>(idx % m);
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;

    double best = 0.0;
    int best_action = -1;
    EvalResult best_reward{};
    for (int a = 0; a < n_action; ++a) {
      const EvalResult rw = evaluate(reward_t[p][a], gi);
      double cand = rw.value;
      if (control.is_deterministic()) {
        cand += expected_at[static_cast<std::size_t>(control.target(p, a)) * m + i].value;
      } else {
        for (int pp = 0; pp < n_pos; ++pp) {
          const double w = control.prob(p, a, pp);
          if (w != 0.0) {
            cand += w * expected_at[static_cast<std::size_t>(pp) * m + i].value;
          }
        }
      }
      if (best_action < 0 || cand > best) {
        best = cand;
        best_action = a;
        best_reward = rw;
      }
    }

    // Envelope row: tangent of the maximizing branch at this anchor.
    double* row = out.value[p].rows.data() + static_cast<std::ptrdiff_t>(i) * d;
    const double* rrow = reward_t[p][best_action].rows.data() +
                         static_cast<std::ptrdiff_t>(best_reward.row) * d;
    for (int c = 0; c < d; ++c) row[c] = rrow[c];
    if (control.is_deterministic()) {
      const int pp = control.target(p, best_action);
      const EvalResult& ev = expected_at[static_cast<std::size_t>(pp) * m + i];
      const double* erow =
          out.expected[pp].rows.data() + static_cast<std::ptrdiff_t>(ev.row) * d;
      for (int c = 0; c < d; ++c) row[c] += erow[c];
    } else {
      for (int pp = 0; pp < n_pos; ++pp) {
        const double w = control.prob(p, best_action, pp);
        if (w == 0.0) continue;
        const EvalResult& ev = expected_at[static_cast<std::size_t>(pp) * m + i];
        const double* erow = out.expected[pp].rows.data() +
                             static_cast<std::ptrdiff_t>(ev.row) * d;
        for (int c = 0; c < d; ++c) row[c] += w * erow[c];
      }
    }
  });
  return out;
}

}  // namespace

StepResult double_modified_step(
    const std::vector<TangentMatrix>& next_value, int /*t*/, const Grid& grid,
    const ControlSpec& control, const DisturbanceSet& disturb,
    const std::vector<std::vector<TangentMatrix>>& reward_t,
    const CandidateTable& candidates) {
  check_step_args(next_value, grid, control, reward_t);
  return step_impl(next_value, grid, control, disturb, reward_t, candidates);
}

StepResult double_modified_step(
    const std::vector<TangentMatrix>& next_value, int t, const Grid& grid,
    const ControlSpec& control, const DisturbanceSet& disturb,
    const std::vector<std::vector<TangentMatrix>>& reward_t,
    const NeighborIndex& index, int k_nn) {
  check_step_args(next_value, grid, control, reward_t);
  const CandidateTable candidates =
      displaced_candidates(grid, disturb, index, k_nn);
  return double_modified_step(next_value, t, grid, control, disturb, reward_t,
                              candidates);
}

FunctionStack backward_induction(const Grid& grid, const ControlSpec& control,
                                 const RewardSubgradients& rewards,
                                 const std::vector<DisturbanceSet>& disturb,
                                 const NeighborIndex& index, int k_nn) {
  const int n_steps = rewards.n_steps();
  if (n_steps < 1) {
    throw std::invalid_argument("backward_induction: T must be >= 1");
  }
  if (disturb.size() != 1 &&
      disturb.size() != static_cast<std::size_t>(n_steps)) {
    throw std::invalid_argument(
        "backward_induction: need one disturbance sampling or one per step");
  }
  if (static_cast<int>(rewards.scrap.size()) != control.n_pos()) {
    throw std::invalid_argument("backward_induction: scrap shape mismatch");
  }

  // Candidate tables are reusable whenever the sampling is; build each
  // distinct one once.
  std::vector<CandidateTable> tables;
  tables.reserve(disturb.size());
  for (const DisturbanceSet& ds : disturb) {
    tables.push_back(displaced_candidates(grid, ds, index, k_nn));
  }

  FunctionStack stack;
  stack.value.resize(n_steps + 1);
  stack.expected.resize(n_steps);
  stack.value[n_steps] = rewards.scrap;
  for (int t = n_steps - 1; t >= 0; --t) {
    const std::size_t di = disturb.size() == 1 ? 0 : static_cast<std::size_t>(t);
    StepResult step =
        double_modified_step(stack.value[t + 1], t, grid, control, disturb[di],
                             rewards.tangents[t], tables[di]);
    stack.value[t] = std::move(step.value);
    stack.expected[t] = std::move(step.expected);
  }
  return stack;
}

}  // namespace csws
