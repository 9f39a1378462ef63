// Exact k-nearest-neighbour search over grid rows (squared Euclidean
// metric, ties broken by ascending row index). Used to restrict the
// tangent argmax search in the fast Bellman and fast dual paths.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <span>
#include <vector>

#include "csws/types.hpp"

namespace csws {

struct Neighbor {
  int index;     // grid row
  double dist2;  // squared Euclidean distance
};

class NeighborIndex {
 public:
  explicit NeighborIndex(const Grid& grid);

  int size() const { return m_; }
  int dim() const { return d_; }

  // The k rows nearest to point, distance-ascending, exact ties by
  // ascending row index. Appends nothing on reuse; out is cleared first.
  void query(const double* point, int k, std::vector<Neighbor>& out) const;
  std::vector<Neighbor> query(const Vec& point, int k) const;

 private:
  struct Node {
    int split_dim = -1;  // -1 marks a leaf
    double split_value = 0.0;
    int left = -1, right = -1;  // children for internal nodes
    int begin = 0, end = 0;     // index range for leaves
  };

  int build(int begin, int end);
  void search(int node, const double* point, int k,
              std::vector<Neighbor>& heap) const;

  int m_ = 0;
  int d_ = 0;
  Mat points_;                // copy of the grid rows
  std::vector<int> order_;    // row indices, permuted by the build
  std::vector<Node> nodes_;
  int root_ = -1;
};

inline NeighborIndex build_index(const Grid& grid) { return NeighborIndex(grid); }

// Validated front end: throws std::invalid_argument unless 1 <= k <= m and
// the point is finite.
std::vector<Neighbor> query_knn(const NeighborIndex& index, const Vec& point,
                                int k);

}  // namespace csws
