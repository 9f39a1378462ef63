#include "csws/parallel.hpp"

#include <atomic>
#include <thread>

namespace csws {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() { return g_max_threads.load(); }

namespace detail {
int resolve_threads() {
  const int n = g_max_threads.load();
  if (n > 0) return n;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
#endif
}
}  // namespace detail

}  // namespace csws
