#pragma once

#include <cstdint>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ci {

inline int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Static-schedule parallel loop over [0, n). Bodies must be independent per
// index so serial and parallel execution produce bit-identical results.
template <class F>
inline void parallel_for(std::int64_t n, F&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Deterministic sum: per-block partial sums computed in parallel, combined
// serially in block order. Result does not depend on the thread count.
template <class F>
inline double block_sum(std::int64_t n_blocks, F&& block_value) {
  std::vector<double> partial(static_cast<std::size_t>(n_blocks), 0.0);
  parallel_for(n_blocks, [&](std::int64_t b) { partial[static_cast<std::size_t>(b)] = block_value(b); });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

// Max-reduction; max is order-independent so a plain omp reduction is fine.
template <class F>
inline double parallel_max(std::int64_t n, F&& value) {
  double m = -1e300;
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) reduction(max : m)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    double v = value(i);
    if (v > m) m = v;
  }
  return n > 0 ? m : 0.0;
}

}  // namespace ci
