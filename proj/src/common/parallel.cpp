#include "gaplab/common/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gaplab {
namespace parallel {

namespace {
int g_threads = 0;
}

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int threads() {
#ifdef _OPENMP
  return g_threads == 0 ? omp_get_max_threads() : g_threads;
#else
  return 1;
#endif
}

bool enabled() { return threads() > 1; }

}  // namespace parallel

void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (!parallel::enabled() || n < 2) {
    serial_for(n, fn);
    return;
  }
#ifdef _OPENMP
  const int nt = parallel::threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<std::size_t>(i));
  }
#else
  serial_for(n, fn);
#endif
}

}  // namespace gaplab
