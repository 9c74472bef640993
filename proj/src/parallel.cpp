#include "vtrace/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vtrace {
namespace {
int g_threads = 0;
}

void set_worker_threads(int n) {
  g_threads = n < 0 ? 0 : n;
#ifdef _OPENMP
  if (g_threads > 0) omp_set_num_threads(g_threads);
#endif
}

int worker_threads() {
  if (g_threads > 0) return g_threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace vtrace
