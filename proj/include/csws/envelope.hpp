// Tangent algebra for convex piecewise linear functions: evaluation,
// subgradient envelope construction, and the expected-value operator that
// re-selects the maximizing tangent row per grid point and disturbance
// atom and averages the composed rows.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csws/neighbors.hpp"
#include "csws/types.hpp"

namespace csws {

struct EvalResult {
  double value;
  int row;  // smallest maximizing row index
};

// max_i row_i . z with the smallest maximizing index.
EvalResult evaluate(const TangentMatrix& tangents, const Vec& z);
EvalResult evaluate(const TangentMatrix& tangents, const double* z);

// The same max restricted to a candidate subset; candidates must be in
// ascending index order so ties resolve to the smallest index.
EvalResult evaluate_within(const TangentMatrix& tangents, const double* z,
                           std::span<const std::int32_t> candidates);

// Neighbour-accelerated evaluation: the argmax is searched over the rows
// anchored at the k_nn grid points nearest to z. k_nn = m is exact.
EvalResult evaluate_nn(const TangentMatrix& tangents, const Vec& z,
                       const NeighborIndex& index, int k_nn);

// Function values and one subgradient per grid point, as sampled from an
// exact convex function.
struct OracleSample {
  Vec values;        // m values f(g^i)
  Mat subgradients;  // m x d, row i a subgradient of f at g^i
};

// Subgradient envelope: row i represents z -> f(g^i) + subgrad_i . (z - g^i).
// Requires an augmented grid (the affine constant folds into column 0).
// Rejects samples that violate convexity consistency, naming the pair (i, j).
TangentMatrix envelope_from_oracle(const Grid& grid, const OracleSample& sample);

// Candidate rows for the argmax at every displaced point W^k g^i: the k_nn
// grid rows nearest to W^k g^i, stored in ascending index order. Depends
// only on (grid, disturbances, k_nn), so one table serves every time step
// of a time-homogeneous model.
class CandidateTable {
 public:
  CandidateTable(int m, int n_atoms, int k_nn);

  int k_nn() const { return k_; }
  int n_atoms() const { return n_; }
  std::span<const std::int32_t> at(int i, int k) const {
    return {idx_.data() + (static_cast<std::size_t>(i) * n_ + k) * k_,
            static_cast<std::size_t>(k_)};
  }
  std::span<std::int32_t> at_mutable(int i, int k) {
    return {idx_.data() + (static_cast<std::size_t>(i) * n_ + k) * k_,
            static_cast<std::size_t>(k_)};
  }

 private:
  int m_, n_, k_;
  std::vector<std::int32_t> idx_;
};

CandidateTable displaced_candidates(const Grid& grid,
                                    const DisturbanceSet& disturb,
                                    const NeighborIndex& index, int k_nn);

// Expected-value (row rearrangement) operator: output row i is
//   sum_k nu^k row_{j*(i,k)} W^k,  j*(i,k) = argmax_j row_j . (W^k g^i),
// with the argmax exact for k_nn = m and restricted to the candidate table
// otherwise. Ties break to the smallest j; the k-sum runs in ascending k.
TangentMatrix expected_pwl(const TangentMatrix& tangents, const Grid& grid,
                           const DisturbanceSet& disturb,
                           const CandidateTable& candidates);
TangentMatrix expected_pwl(const TangentMatrix& tangents, const Grid& grid,
                           const DisturbanceSet& disturb,
                           const NeighborIndex& index, int k_nn);

}  // namespace csws
