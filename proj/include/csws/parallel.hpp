// Deterministic parallel loops: every index writes its own output slot, so
// the result is identical for any worker count.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csws {

// 0 means "use the hardware default". Set once by the CLI before compute.
void set_max_threads(int n);
int max_threads();

namespace detail {
int resolve_threads();
}

// fn(i) is invoked exactly once per i in [0, n); iterations must not share
// mutable state. Chunking is static but irrelevant to the output.
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
#ifdef _OPENMP
  const int k = detail::resolve_threads();
#pragma omp parallel for schedule(static) num_threads(k)
  for (std::int64_t i = 0; i < n; ++i) fn(i);
#else
  for (std::int64_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace csws
