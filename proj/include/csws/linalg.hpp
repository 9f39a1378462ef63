// Shared dense-matrix typedefs and small scalar kernels
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace csws {

// Row-major so that tangent rows and grid rows are contiguous in memory.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Plain sequential dot product. The hot loops use this instead of Eigen
// expressions so the summation order is fixed and results do not depend on
// alignment or vectorization of a particular call site.
inline double dot_n(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int c = 0; c < n; ++c) s += a[c] * b[c];
  return s;
}

inline double dot_row(const Mat& m, int i, const double* z) {
  return dot_n(m.data() + static_cast<std::ptrdiff_t>(i) * m.cols(), z,
               static_cast<int>(m.cols()));
}

// Tolerance scale for unitless comparisons: 1 + largest magnitude involved.
inline double scale_of(const Mat& a) {
  return 1.0 + (a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
}

inline double scale_of(const Mat& a, const Mat& b) {
  return std::max(scale_of(a), scale_of(b));
}

inline bool all_finite(const Mat& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i])) return false;
  }
  return true;
}

}  // namespace csws
