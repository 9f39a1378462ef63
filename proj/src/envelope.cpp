#include "csws/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "csws/parallel.hpp"

namespace csws {

EvalResult evaluate(const TangentMatrix& tangents, const double* z) {
  const int m = tangents.count();
  const int d = tangents.dim();
  const double* row = tangents.rows.data();
  double best = dot_n(row, z, d);
  int best_row = 0;
  for (int j = 1; j < m; ++j) {
    row += d;
    const double v = dot_n(row, z, d);
    if (v > best) {
      best = v;
      best_row = j;
    }
  }
  return {best, best_row};
}

EvalResult evaluate(const TangentMatrix& tangents, const Vec& z) {
  if (z.size() != tangents.dim()) {
    throw std::invalid_argument("evaluate: point dimension mismatch");
  }
  return evaluate(tangents, z.data());
}

EvalResult evaluate_within(const TangentMatrix& tangents, const double* z,
                           std::span<const std::int32_t> candidates) {
  const int d = tangents.dim();
  const double* base = tangents.rows.data();
  double best = dot_n(base + static_cast<std::ptrdiff_t>(candidates[0]) * d, z, d);
  int best_row = candidates[0];
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const int j = candidates[c];
    const double v = dot_n(base + static_cast<std::ptrdiff_t>(j) * d, z, d);
    if (v > best) {
      best = v;
      best_row = j;
    }
  }
  return {best, best_row};
}

EvalResult evaluate_nn(const TangentMatrix& tangents, const Vec& z,
                       const NeighborIndex& index, int k_nn) {
  if (k_nn >= index.size()) return evaluate(tangents, z);
  thread_local std::vector<Neighbor> neighbors;
  thread_local std::vector<std::int32_t> candidates;
  index.query(z.data(), k_nn, neighbors);
  candidates.clear();
  for (const Neighbor& nb : neighbors) candidates.push_back(nb.index);
  std::sort(candidates.begin(), candidates.end());
  return evaluate_within(tangents, z.data(), candidates);
}

TangentMatrix envelope_from_oracle(const Grid& grid, const OracleSample& sample) {
  const int m = grid.size();
  const int d = grid.dim();
  if (sample.values.size() != m || sample.subgradients.rows() != m ||
      sample.subgradients.cols() != d) {
    throw std::invalid_argument("envelope_from_oracle: sample shape mismatch");
  }
  if (!grid.augmented) {
    throw std::invalid_argument(
        "envelope_from_oracle: tangent rows carry the affine constant in the "
        "augmented coordinate; grid must be augmented");
  }
  // Convexity consistency: every tangent underestimates f at every anchor.
  const double tol =
      1e-9 * std::max(scale_of(sample.subgradients, grid.points),
                      1.0 + sample.values.cwiseAbs().maxCoeff());
  for (int i = 0; i < m; ++i) {
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;
    const double base = sample.values[i] - dot_row(sample.subgradients, i, gi);
    for (int j = 0; j < m; ++j) {
      const double* gj = grid.points.data() + static_cast<std::ptrdiff_t>(j) * d;
      if (base + dot_row(sample.subgradients, i, gj) > sample.values[j] + tol) {
        throw std::invalid_argument(
            "envelope_from_oracle: subgradient at point " + std::to_string(i) +
            " overestimates the value at point " + std::to_string(j) +
            " (not convexity-consistent)");
      }
    }
  }
  TangentMatrix out;
  out.rows = sample.subgradients;
  for (int i = 0; i < m; ++i) {
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;
    out.rows(i, 0) += sample.values[i] - dot_row(sample.subgradients, i, gi);
  }
  return out;
}

CandidateTable::CandidateTable(int m, int n_atoms, int k_nn)
    : m_(m), n_(n_atoms), k_(k_nn),
      idx_(static_cast<std::size_t>(m) * n_atoms * k_nn) {}

CandidateTable displaced_candidates(const Grid& grid,
                                    const DisturbanceSet& disturb,
                                    const NeighborIndex& index, int k_nn) {
  const int m = grid.size();
  const int d = grid.dim();
  const int n = disturb.count();
  if (k_nn < 1 || k_nn > m) {
    throw std::invalid_argument("displaced_candidates: k_nn must lie in [1, m]");
  }
  CandidateTable table(m, n, k_nn);
  parallel_for(m, [&](std::int64_t i) {
    std::vector<Neighbor> neighbors;
    std::vector<double> y(d);
    for (int k = 0; k < n; ++k) {
      const Mat& w = disturb.matrices[k];
      const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;
      for (int r = 0; r < d; ++r) y[r] = dot_row(w, r, gi);
      index.query(y.data(), k_nn, neighbors);
      auto slot = table.at_mutable(static_cast<int>(i), k);
      for (int c = 0; c < k_nn; ++c) slot[c] = neighbors[c].index;
      std::sort(slot.begin(), slot.end());
    }
  });
  return table;
}

namespace {

void check_expected_args(const TangentMatrix& tangents, const Grid& grid,
                         const DisturbanceSet& disturb) {
  if (tangents.count() != grid.size() || tangents.dim() != grid.dim()) {
    throw std::invalid_argument("expected_pwl: tangent shape mismatch");
  }
  for (const Mat& w : disturb.matrices) {
    if (w.rows() != grid.dim() || w.cols() != grid.dim()) {
      throw std::invalid_argument("expected_pwl: disturbance dimension mismatch");
    }
  }
}

// Shared core; candidates == nullptr runs the exact argmax over all rows.
TangentMatrix expected_pwl_impl(const TangentMatrix& tangents, const Grid& grid,
                                const DisturbanceSet& disturb,
                                const CandidateTable* candidates) {
  const int m = grid.size();
  const int d = grid.dim();
  const int n = disturb.count();
  TangentMatrix out;
  out.rows.setZero(m, d);
  parallel_for(m, [&](std::int64_t i) {
    std::vector<double> y(d);
    std::vector<double> accum(d, 0.0);
    const double* gi = grid.points.data() + static_cast<std::ptrdiff_t>(i) * d;
    for (int k = 0; k < n; ++k) {
      const Mat& w = disturb.matrices[k];
      for (int r = 0; r < d; ++r) y[r] = dot_row(w, r, gi);
      const EvalResult pick =
          candidates ? evaluate_within(tangents, y.data(),
                                       candidates->at(static_cast<int>(i), k))
                     : evaluate(tangents, y.data());
      // accum += nu^k * row_{j*} W^k   (row vector times matrix)
      const double nu = disturb.weights[k];
      const double* row =
          tangents.rows.data() + static_cast<std::ptrdiff_t>(pick.row) * d;
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += row[r] * w(r, c);
        accum[c] += nu * s;
      }
    }
    for (int c = 0; c < d; ++c) out.rows(static_cast<int>(i), c) = accum[c];
  });
  return out;
}

}  // namespace

TangentMatrix expected_pwl(const TangentMatrix& tangents, const Grid& grid,
                           const DisturbanceSet& disturb,
                           const CandidateTable& candidates) {
  check_expected_args(tangents, grid, disturb);
  if (candidates.n_atoms() != disturb.count()) {
    throw std::invalid_argument("expected_pwl: candidate table atom mismatch");
  }
  if (candidates.k_nn() >= grid.size()) {
    return expected_pwl_impl(tangents, grid, disturb, nullptr);
  }
  return expected_pwl_impl(tangents, grid, disturb, &candidates);
}

TangentMatrix expected_pwl(const TangentMatrix& tangents, const Grid& grid,
                           const DisturbanceSet& disturb,
                           const NeighborIndex& index, int k_nn) {
  check_expected_args(tangents, grid, disturb);
  if (k_nn < 1 || k_nn > grid.size()) {
    throw std::invalid_argument("expected_pwl: k_nn must lie in [1, m]");
  }
  if (k_nn == grid.size()) {
    return expected_pwl_impl(tangents, grid, disturb, nullptr);
  }
  const CandidateTable table = displaced_candidates(grid, disturb, index, k_nn);
  return expected_pwl_impl(tangents, grid, disturb, &table);
}

}  // namespace csws
