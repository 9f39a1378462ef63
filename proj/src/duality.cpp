#include "csws/duality.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>

#include "csws/parallel.hpp"

namespace csws {

MartingaleIncrements mart_increments(const PathBundle& paths,
                                     const SubsimBundle& subsim,
                                     const Grid& grid,
                                     const FunctionStack& stack,
                                     const RewardOracle& scrap_oracle,
                                     const NeighborIndex& index, int k_nn) {
  const int n_path = paths.n_path();
  const int n_steps = paths.n_dec() - 1;
  const int n_pos = stack.n_pos();
  const int d = paths.dim();
  if (stack.n_dec() != paths.n_dec()) {
    throw std::invalid_argument("mart_increments: stack/path epoch mismatch");
  }
  if (subsim.n_path() != n_path || subsim.n_steps() != n_steps) {
    throw std::invalid_argument("mart_increments: subsim shape mismatch");
  }
  if (grid.dim() != d) {
    throw std::invalid_argument("mart_increments: dimension mismatch");
  }
  if (k_nn < 1 || k_nn > grid.size()) {
    throw std::invalid_argument("mart_increments: k_nn must lie in [1, m]");
  }

  MartingaleIncrements mart(n_path, n_steps, n_pos);
  parallel_for(n_path, [&](std::int64_t ip) {
    const int i = static_cast<int>(ip);
    Mat s(d, d);
    Vec y(d), z_next(d), z_cur(d);
    std::vector<double> acc(n_pos);
    for (int t = 0; t < n_steps; ++t) {
      const bool terminal = (t + 1 == n_steps);  // the next epoch is T
      for (int c = 0; c < d; ++c) z_next[c] = paths.state(i, t + 1)[c];
      for (int c = 0; c < d; ++c) z_cur[c] = paths.state(i, t)[c];

      // Subsimulation estimate of the conditional expectation, summed in
      // ascending subsim order.
      for (int p = 0; p < n_pos; ++p) acc[p] = 0.0;
      for (int k = 0; k < subsim.n_subsim(); ++k) {
        subsim.matrix(k, i, t, s);
        for (int r = 0; r < d; ++r) y[r] = dot_row(s, r, z_cur.data());
        const double w = subsim.weight(k);
        if (terminal) {
          for (int p = 0; p < n_pos; ++p) acc[p] += w * scrap_oracle.scrap(p, y);
        } else {
          for (int p = 0; p < n_pos; ++p) {
            acc[p] += w * evaluate_nn(stack.value[t + 1][p], y, index, k_nn).value;
          }
        }
      }
      for (int p = 0; p < n_pos; ++p) {
        const double realized =
            terminal ? scrap_oracle.scrap(p, z_next)
                     : evaluate_nn(stack.value[t + 1][p], z_next, index, k_nn).value;
        mart.at(i, t, p) = realized - acc[p];
      }
    }
  });
  return mart;
}

BoundSample dual_bounds(const PathBundle& paths, const ControlSpec& control,
                        const RewardOracle& oracle, const PathPolicy& policy,
                        const MartingaleIncrements& mart) {
  const int n_path = paths.n_path();
  const int n_steps = paths.n_dec() - 1;
  const int n_pos = control.n_pos();
  const int n_action = control.n_action();
  const int d = paths.dim();
  if (policy.n_path() != n_path || policy.n_steps() != n_steps ||
      policy.n_pos() != n_pos) {
    throw std::invalid_argument("dual_bounds: policy shape mismatch");
  }
  if (mart.n_path() != n_path || mart.n_steps() != n_steps ||
      mart.n_pos() != n_pos) {
    throw std::invalid_argument("dual_bounds: increment shape mismatch");
  }

  BoundSample out;
  out.primal.resize(n_path, n_pos);
  out.dual.resize(n_path, n_pos);
  parallel_for(n_path, [&](std::int64_t ip) {
    const int i = static_cast<int>(ip);
    Vec z(d);
    std::vector<double> dual_next(n_pos), lower_next(n_pos);
    std::vector<double> dual_cur(n_pos), lower_cur(n_pos);
    for (int c = 0; c < d; ++c) z[c] = paths.state(i, n_steps)[c];
    for (int p = 0; p < n_pos; ++p) {
      dual_next[p] = lower_next[p] = oracle.scrap(p, z);
    }
    for (int t = n_steps - 1; t >= 0; --t) {
      for (int c = 0; c < d; ++c) z[c] = paths.state(i, t)[c];
      for (int p = 0; p < n_pos; ++p) {
        double best = 0.0;
        bool first = true;
        const int a_pol = policy.action(i, t, p);
        double at_policy = 0.0;
        for (int a = 0; a < n_action; ++a) {
          const double reward = oracle.reward(t, p, a, z);
          double cand = reward;
          double cand_lower = reward;
          if (control.is_deterministic()) {
            const int pp = control.target(p, a);
            cand += dual_next[pp] - mart.at(i, t, pp);
            cand_lower += lower_next[pp] - mart.at(i, t, pp);
          } else {
            for (int pp = 0; pp < n_pos; ++pp) {
              const double w = control.prob(p, a, pp);
              if (w != 0.0) {
                cand += w * (dual_next[pp] - mart.at(i, t, pp));
                cand_lower += w * (lower_next[pp] - mart.at(i, t, pp));
              }
            }
          }
          if (first || cand > best) {
            best = cand;
            first = false;
          }
          if (a == a_pol) at_policy = cand_lower;
        }
        dual_cur[p] = best;
        lower_cur[p] = at_policy;
      }
      dual_next = dual_cur;
      lower_next = lower_cur;
    }
    for (int p = 0; p < n_pos; ++p) {
      out.primal(i, p) = lower_next[p];
      out.dual(i, p) = dual_next[p];
    }
  });
  return out;
}

BoundInterval get_bounds(const BoundSample& sample, double alpha, int p) {
  const int n = static_cast<int>(sample.primal.rows());
  if (n < 2) {
    throw std::invalid_argument("get_bounds: need n_path >= 2 for a variance");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("get_bounds: alpha must lie in (0, 1)");
  }
  if (p < 0 || p >= sample.primal.cols()) {
    throw std::invalid_argument("get_bounds: position out of range");
  }

  auto mean_se = [n](const Mat& m, int col, double& mean, double& se) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += m(i, col);
    mean = sum / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dev = m(i, col) - mean;
      ss += dev * dev;
    }
    se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  };

  BoundInterval out;
  out.n_path = n;
  mean_se(sample.primal, p, out.mean_primal, out.se_primal);
  mean_se(sample.dual, p, out.mean_dual, out.se_dual);
  const boost::math::normal_distribution<double> std_normal;
  const double q = boost::math::quantile(std_normal, 1.0 - alpha / 2.0);
  out.low = out.mean_primal - q * out.se_primal;
  out.high = out.mean_dual + q * out.se_dual;
  return out;
}

}  // namespace csws
