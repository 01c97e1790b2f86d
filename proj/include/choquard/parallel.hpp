#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace choquard {

/// Caps the worker count used by parallel loops. n <= 0 restores the default.
void set_threads(int n);
int thread_count();

namespace detail {

inline constexpr std::size_t kReduceChunk = 1u << 13;

double pairwise_combine(std::vector<double>& partial);

}  // namespace detail

/// Sum of term(i) for i in [0, n). The result does not depend on the thread
/// count: terms are summed serially in fixed-size chunks and the chunk sums
/// are combined pairwise.
template <class F>
double det_sum(std::size_t n, F&& term) {
  const std::size_t chunks = (n + detail::kReduceChunk - 1) / detail::kReduceChunk;
  std::vector<double> partial(chunks, 0.0);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * detail::kReduceChunk;
    const std::size_t hi = std::min(n, lo + detail::kReduceChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  return detail::pairwise_combine(partial);
}

/// Runs body(i) for i in [0, n); each index must write disjoint state.
template <class F>
void parallel_for(std::size_t n, F&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace choquard
