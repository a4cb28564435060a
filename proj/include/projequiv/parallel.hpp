#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace projequiv {

// Number of worker threads implied by a request: n <= 0 means "use the
// PROJEQUIV_THREADS environment variable, else 1". Results never depend on
// the thread count; only wall time does.
int resolve_thread_count(int requested);

// Runs body(i) for i in [0, n). With threads <= 1 this is a plain loop.
// Otherwise indices are split into contiguous chunks, one std::thread per
// chunk; the body must only write to per-index slots so that the outcome is
// identical for any thread count. The first exception thrown by any worker
// is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation over a fixed ordering: deterministic and more
// accurate than naive left-to-right accumulation for long sums.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace projequiv
