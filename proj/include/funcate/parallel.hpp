#pragma once

#include <omp.h>

#include <algorithm>

namespace funcate {

// Worker cap from the FUNCATE_THREADS environment variable; 0 or unset
// means all hardware threads. Re-read on every call so tests can switch it.
int threadBudget();

// Runs body(i) for i in [0, count). Uses an OpenMP team capped by
// threadBudget(); falls back to a plain loop when the budget is 1 or when
// already inside a parallel region, so nested use never oversubscribes.
// Bodies must be independent across indices and write only to per-index
// slots; results are then identical for every thread count.
template <typename F>
void parallelFor(int count, F&& body) {
  const int threads = std::min(threadBudget(), count);
  if (threads <= 1 || omp_in_parallel()) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < count; ++i) body(i);
}

}  // namespace funcate
