#include "csws/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csws {

ControlSpec ControlSpec::deterministic(Eigen::MatrixXi targets) {
  if (targets.rows() < 1 || targets.cols() < 1) {
    throw std::invalid_argument("ControlSpec: target table must be nonempty");
  }
  ControlSpec c;
  c.n_pos_ = static_cast<int>(targets.rows());
  c.n_action_ = static_cast<int>(targets.cols());
  c.targets_ = std::move(targets);
  return c;
}

ControlSpec ControlSpec::stochastic(std::vector<Mat> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("ControlSpec: probability tensor must be nonempty");
  }
  ControlSpec c;
  c.n_pos_ = static_cast<int>(probs.size());
  c.n_action_ = static_cast<int>(probs[0].rows());
  for (const Mat& slice : probs) {
    if (slice.rows() != c.n_action_ || slice.cols() != c.n_pos_) {
      throw std::invalid_argument("ControlSpec: ragged probability tensor");
    }
  }
  c.probs_ = std::move(probs);
  return c;
}

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kDominanceTol = 1e-9;

void check_grid(const Grid& grid, std::vector<Violation>& out) {
  if (grid.size() < 1 || grid.dim() < 1) {
    out.push_back({"Grid", "must have m >= 1 points and d >= 1 coordinates"});
    return;
  }
  if (!all_finite(grid.points)) {
    out.push_back({"Grid.points", "entries must be finite"});
    return;
  }
  if (grid.augmented) {
    for (int i = 0; i < grid.size(); ++i) {
      if (grid.points(i, 0) != 1.0) {
        out.push_back({"Grid.points(" + std::to_string(i) + ",0)",
                       "augmented grid requires column 0 == 1 exactly"});
        break;
      }
    }
  }
  // Pairwise distinct rows, via a lexicographic sort of row indices.
  std::vector<int> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  const Mat& p = grid.points;
  auto row_less = [&](int a, int b) {
    for (int c = 0; c < grid.dim(); ++c) {
      if (p(a, c) != p(b, c)) return p(a, c) < p(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const int a = order[i], b = order[i + 1];
    if (!row_less(a, b) && !row_less(b, a)) {
      out.push_back({"Grid.points", "rows " + std::to_string(std::min(a, b)) +
                                        " and " + std::to_string(std::max(a, b)) +
                                        " coincide"});
      break;
    }
  }
}

void check_control(const ControlSpec& control, std::vector<Violation>& out) {
  const int n_pos = control.n_pos();
  if (control.is_deterministic()) {
    for (int p = 0; p < n_pos; ++p) {
      for (int a = 0; a < control.n_action(); ++a) {
        const int tgt = control.target(p, a);
        if (tgt < 0 || tgt >= n_pos) {
          out.push_back({"ControlSpec(" + std::to_string(p) + "," +
                             std::to_string(a) + ")",
                         "target position " + std::to_string(tgt) +
                             " outside {0.." + std::to_string(n_pos - 1) + "}"});
        }
      }
    }
    return;
  }
  for (int p = 0; p < n_pos; ++p) {
    for (int a = 0; a < control.n_action(); ++a) {
      double sum = 0.0;
      for (int pp = 0; pp < n_pos; ++pp) {
        const double w = control.prob(p, a, pp);
        if (w < 0.0 || !std::isfinite(w)) {
          out.push_back({"ControlSpec(" + std::to_string(p) + "," +
                             std::to_string(a) + "," + std::to_string(pp) + ")",
                         "transition probability must be finite and >= 0"});
        }
        sum += w;
      }
      if (std::abs(sum - 1.0) > kWeightTol) {
        out.push_back({"ControlSpec(" + std::to_string(p) + "," +
                           std::to_string(a) + ",.)",
                       "transition probabilities sum to " + std::to_string(sum)});
      }
    }
  }
}

void check_disturbances(const std::vector<DisturbanceSet>& disturb, int d,
                        std::vector<Violation>& out) {
  if (disturb.empty()) {
    out.push_back({"DisturbanceSet", "at least one sampling is required"});
    return;
  }
  for (std::size_t s = 0; s < disturb.size(); ++s) {
    const DisturbanceSet& ds = disturb[s];
    const std::string tag =
        disturb.size() == 1 ? std::string("DisturbanceSet")
                            : "DisturbanceSet[" + std::to_string(s) + "]";
    if (ds.count() < 1) {
      out.push_back({tag, "needs at least one atom"});
      continue;
    }
    if (ds.weights.size() != ds.count()) {
      out.push_back({tag + ".weights", "one weight per matrix required"});
      continue;
    }
    double sum = 0.0;
    bool pos = true;
    for (int k = 0; k < ds.count(); ++k) {
      sum += ds.weights[k];
      pos = pos && ds.weights[k] > 0.0;
    }
    if (!pos) out.push_back({tag + ".weights", "all weights must be > 0"});
    if (std::abs(sum - 1.0) > kWeightTol) {
      out.push_back({tag + ".weights", "weights sum to " + std::to_string(sum)});
    }
    for (int k = 0; k < ds.count(); ++k) {
      if (ds.matrices[k].rows() != d || ds.matrices[k].cols() != d) {
        out.push_back({tag + ".matrices[" + std::to_string(k) + "]",
                       "must be " + std::to_string(d) + "x" + std::to_string(d)});
      } else if (!all_finite(ds.matrices[k])) {
        out.push_back({tag + ".matrices[" + std::to_string(k) + "]",
                       "entries must be finite"});
      }
    }
  }
}

void check_tangents(const TangentMatrix& tm, const Grid& grid,
                    const std::string& tag, std::vector<Violation>& out) {
  if (tm.count() != grid.size() || tm.dim() != grid.dim()) {
    out.push_back({tag, "shape must match the grid (" +
                            std::to_string(grid.size()) + "x" +
                            std::to_string(grid.dim()) + ")"});
    return;
  }
  if (!all_finite(tm.rows)) {
    out.push_back({tag, "entries must be finite"});
    return;
  }
  // Anchor dominance: row i attains the max at its own anchor.
  const double tol = kDominanceTol * scale_of(tm.rows, grid.points);
  const int m = grid.size();
  for (int i = 0; i < m; ++i) {
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * grid.dim();
    const double own = dot_row(tm.rows, i, gi);
    for (int j = 0; j < m; ++j) {
      if (dot_row(tm.rows, j, gi) > own + tol) {
        out.push_back({tag, "row " + std::to_string(i) +
                                " is dominated at its own anchor by row " +
                                std::to_string(j)});
        return;
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate_model(const Grid& grid,
                                      const ControlSpec& control,
                                      const std::vector<DisturbanceSet>& disturb,
                                      const RewardSubgradients& rewards) {
  std::vector<Violation> out;
  check_grid(grid, out);
  if (!out.empty()) return out;  // later checks assume a sane grid

  check_control(control, out);
  check_disturbances(disturb, grid.dim(), out);
  if (disturb.size() > 1 &&
      disturb.size() != static_cast<std::size_t>(rewards.n_steps())) {
    out.push_back({"DisturbanceSet",
                   "per-time sequence must have one sampling per decision step"});
  }

  const int n_steps = rewards.n_steps();
  if (n_steps < 1) {
    out.push_back({"RewardSubgradients", "needs at least one decision step"});
    return out;
  }
  if (static_cast<int>(rewards.scrap.size()) != control.n_pos()) {
    out.push_back({"RewardSubgradients.scrap", "one tangent matrix per position"});
    return out;
  }
  for (int t = 0; t < n_steps; ++t) {
    if (static_cast<int>(rewards.tangents[t].size()) != control.n_pos()) {
      out.push_back({"RewardSubgradients.tangents[" + std::to_string(t) + "]",
                     "one entry per position"});
      return out;
    }
    for (int p = 0; p < control.n_pos(); ++p) {
      if (static_cast<int>(rewards.tangents[t][p].size()) != control.n_action()) {
        out.push_back({"RewardSubgradients.tangents[" + std::to_string(t) + "][" +
                           std::to_string(p) + "]",
                       "one entry per action"});
        return out;
      }
      for (int a = 0; a < control.n_action(); ++a) {
        check_tangents(rewards.tangents[t][p][a], grid,
                       "RewardSubgradients.tangents[" + std::to_string(t) + "][" +
                           std::to_string(p) + "][" + std::to_string(a) + "]",
                       out);
      }
    }
  }
  for (int p = 0; p < control.n_pos(); ++p) {
    check_tangents(rewards.scrap[p], grid,
                   "RewardSubgradients.scrap[" + std::to_string(p) + "]", out);
  }
  return out;
}

}  // namespace csws
