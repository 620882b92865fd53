#pragma once

#include <cstddef>
#include <functional>

namespace polystokes {

/// Worker count: POLYSTOKES_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks, one chunk per worker.
/// body must only write to slots owned by index i. The first exception thrown
/// by any worker is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace polystokes
