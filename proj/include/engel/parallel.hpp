#pragma once

#include <cstddef>
#include <functional>

namespace engel {

// Worker count from ENGEL_NUM_WORKERS (default: hardware concurrency, at least 1).
int worker_count();

// Runs fn(0..n-1) on up to worker_count() threads. Callers write results by index, so output order
// never depends on scheduling. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace engel
