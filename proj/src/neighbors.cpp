#include "csws/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csws {

namespace {

constexpr int kLeafSize = 16;

// Strict order by (dist2, index); used as a max-heap comparator, it keeps
// the worst of the current k candidates at the heap front, and a smaller
// index wins among exact ties.
inline bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
  return a.index < b.index;
}

}  // namespace

NeighborIndex::NeighborIndex(const Grid& grid)
    : m_(grid.size()), d_(grid.dim()), points_(grid.points), order_(m_) {
  for (int i = 0; i < m_; ++i) order_[i] = i;
  nodes_.reserve(static_cast<std::size_t>(2 * m_ / kLeafSize + 2));
  root_ = build(0, m_);
}

int NeighborIndex::build(int begin, int end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    // Leaf rows in ascending index order: the scan then visits exact ties
    // smallest-index first.
    std::sort(order_.begin() + begin, order_.begin() + end);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }
  // Split along the widest extent.
  int dim = 0;
  double best_spread = -1.0;
  for (int c = 0; c < d_; ++c) {
    double lo = points_(order_[begin], c), hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      const double v = points_(order_[i], c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      dim = c;
    }
  }
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     if (points_(a, dim) != points_(b, dim)) {
                       return points_(a, dim) < points_(b, dim);
                     }
                     return a < b;
                   });
  node.split_dim = dim;
  node.split_value = points_(order_[mid], dim);
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void NeighborIndex::search(int node_id, const double* point, int k,
                           std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.split_dim < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int row = order_[i];
      double dist2 = 0.0;
      const double* p = points_.data() + static_cast<std::ptrdiff_t>(row) * d_;
      for (int c = 0; c < d_; ++c) {
        const double diff = p[c] - point[c];
        dist2 += diff * diff;
      }
      const Neighbor cand{row, dist2};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double delta = point[node.split_dim] - node.split_value;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, point, k, heap);
  // Visit the far side unless the splitting plane is strictly farther than
  // the current worst candidate; on equality an equal-distance smaller
  // index may still hide there.
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().dist2) {
    search(far, point, k, heap);
  }
}

void NeighborIndex::query(const double* point, int k,
                          std::vector<Neighbor>& out) const {
  out.clear();
  search(root_, point, k, out);
  std::sort(out.begin(), out.end(), closer);
}

std::vector<Neighbor> NeighborIndex::query(const Vec& point, int k) const {
  std::vector<Neighbor> out;
  query(point.data(), k, out);
  return out;
}

std::vector<Neighbor> query_knn(const NeighborIndex& index, const Vec& point,
                                int k) {
  if (k < 1 || k > index.size()) {
    throw std::invalid_argument("query_knn: k must lie in [1, m]");
  }
  if (point.size() != index.dim()) {
    throw std::invalid_argument("query_knn: point dimension mismatch");
  }
  for (int c = 0; c < index.dim(); ++c) {
    if (!std::isfinite(point[c])) {
      throw std::invalid_argument("query_knn: point must be finite");
    }
  }
  return index.query(point, k);
}

}  // namespace csws
