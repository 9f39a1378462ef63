// Double-modified backward induction: disturbance expectations replaced by
// the weighted finite sampling, and the subgradient envelope applied to the
// actionwise max by summing the maximizing tangent rows.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <vector>

#include "csws/envelope.hpp"
#include "csws/types.hpp"

namespace csws {

struct StepResult {
  std::vector<TangentMatrix> value;     // v_t(p, .) per position
  std::vector<TangentMatrix> expected;  // E-part of the operator per position
};

// One induction step from v_{t+1} to v_t.
//   expected[p'] = expected_pwl(next_value[p'], ...)
//   value[p] row i = reward row at the argmax action plus the transition-
//   weighted expected rows attaining the max at g^i.
// Action ties break to the smallest action index.
StepResult double_modified_step(
    const std::vector<TangentMatrix>& next_value, int t, const Grid& grid,
    const ControlSpec& control, const DisturbanceSet& disturb,
    const std::vector<std::vector<TangentMatrix>>& reward_t,
    const NeighborIndex& index, int k_nn);

// Same step with a precomputed displaced-candidate table (the table is
// reusable across time steps of a time-homogeneous model).
StepResult double_modified_step(
    const std::vector<TangentMatrix>& next_value, int t, const Grid& grid,
    const ControlSpec& control, const DisturbanceSet& disturb,
    const std::vector<std::vector<TangentMatrix>>& reward_t,
    const CandidateTable& candidates);

// Full recursion: value[T] is the scrap envelope, then T-1 .. 0 steps.
// disturb holds either one sampling reused at every step or one per step.
FunctionStack backward_induction(const Grid& grid, const ControlSpec& control,
                                 const RewardSubgradients& rewards,
                                 const std::vector<DisturbanceSet>& disturb,
                                 const NeighborIndex& index, int k_nn);

}  // namespace csws
