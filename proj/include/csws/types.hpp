// Domain types for convex switching systems: grids, position controls,
// disturbance samplings and max-of-affine (tangent) representations.
//
// Conventions used throughout the library:
//   - positions p, actions a and times t are 0-based in code; configs,
//     reports and CSVs present positions/actions 1-based.
//   - a value function v(p, .) is stored as a TangentMatrix whose row i is
//     an affine function z -> row_i . z anchored at grid row i, and
//     v(p, z) is approximated by the max over rows.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csws/linalg.hpp"

namespace csws {

// Support points anchoring all tangents; row i is grid point g^i.
struct Grid {
  Mat points;             // m x d
  bool augmented = true;  // column 0 identically 1

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Convex piecewise linear function as a maximum of affine rows.
struct TangentMatrix {
  Mat rows;  // m x d, row i anchored at grid point g^i

  int count() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

// Weighted finite sampling of one disturbance W_t.
struct DisturbanceSet {
  std::vector<Mat> matrices;  // n matrices, each d x d
  Vec weights;                // n positive weights summing to 1

  int count() const { return static_cast<int>(matrices.size()); }
};

// Position transition law alpha^a_{p,p'}: either a deterministic target
// table or a full stochastic tensor.
class ControlSpec {
 public:
  ControlSpec() = default;  // empty; fill via the factories below

  // targets(p, a) is the 0-based position reached from p by action a.
  static ControlSpec deterministic(Eigen::MatrixXi targets);
  // probs[p](a, p') is the probability of moving p -> p' under action a.
  static ControlSpec stochastic(std::vector<Mat> probs);

  bool is_deterministic() const { return targets_.has_value(); }
  int n_pos() const { return n_pos_; }
  int n_action() const { return n_action_; }

  // Deterministic form only.
  int target(int p, int a) const { return (*targets_)(p, a); }
  const Eigen::MatrixXi& targets() const { return *targets_; }

  // Valid for both forms; the deterministic table reads as a 0/1 tensor.
  double prob(int p, int a, int pp) const {
    if (targets_) return (*targets_)(p, a) == pp ? 1.0 : 0.0;
    return (*probs_)[p](a, pp);
  }
  const std::vector<Mat>& probs() const { return *probs_; }

 private:
  std::optional<Eigen::MatrixXi> targets_;
  std::optional<std::vector<Mat>> probs_;
  int n_pos_ = 0;
  int n_action_ = 0;
};

// Output of the backward induction.
//   value[t][p]    : tangents of v_t(p, .), t = 0..T
//   expected[t][p] : tangents of z -> sum_k nu^k v_{t+1}(p, W^k z), t = 0..T-1
struct FunctionStack {
  std::vector<std::vector<TangentMatrix>> value;
  std::vector<std::vector<TangentMatrix>> expected;

  int n_dec() const { return static_cast<int>(value.size()); }
  int n_pos() const { return value.empty() ? 0 : static_cast<int>(value[0].size()); }
};

// Subgradient (tangent) representation of the reward and scrap functions.
//   tangents[t][p][a] : tangents of r_t(p, ., a), t = 0..T-1
//   scrap[p]          : tangents of r_T(p, .)
struct RewardSubgradients {
  std::vector<std::vector<std::vector<TangentMatrix>>> tangents;
  std::vector<TangentMatrix> scrap;

  int n_steps() const { return static_cast<int>(tangents.size()); }
};

// Exact reward/scrap callables used along simulated paths and in the
// bound recursions (never the PWL approximation). t is 0-based; the
// discount factor at the first decision epoch t=0 is 1.
struct RewardOracle {
  std::function<double(int t, int p, int a, const Vec& z)> reward;
  std::function<double(int p, const Vec& z)> scrap;
};

// A failed invariant, as data: which component, which rule.
struct Violation {
  std::string component;  // e.g. "DisturbanceSet.weights", "ControlSpec(1,0)"
  std::string rule;

  std::string describe() const { return component + ": " + rule; }
};

// Cross-checks all dimension and invariant rules over a model's parts.
// Empty result means the model is consistent. Violations are data, not
// failures; nothing throws.
std::vector<Violation> validate_model(const Grid& grid,
                                      const ControlSpec& control,
                                      const std::vector<DisturbanceSet>& disturb,
                                      const RewardSubgradients& rewards);

}  // namespace csws
