#include "choquard/parallel.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace choquard {

namespace {
#if defined(_OPENMP)
int g_default_threads = omp_get_max_threads();
#endif
}  // namespace

void set_threads(int n) {
#if defined(_OPENMP)
  omp_set_num_threads(n > 0 ? n : g_default_threads);
#else
  (void)n;
#endif
}

int thread_count() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {

double pairwise_combine(std::vector<double>& partial) {
  if (partial.empty()) return 0.0;
  std::size_t len = partial.size();
  while (len > 1) {
    const std::size_t half = (len + 1) / 2;
    for (std::size_t i = 0; i + half < len; ++i) partial[i] += partial[i + half];
    len = half;
  }
  return partial[0];
}

}  // namespace detail
}  // namespace choquard
