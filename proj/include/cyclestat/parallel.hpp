#pragma once

#include <cstddef>
#include <functional>

namespace cyclestat {

/// Worker count: CYCLESTAT_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n), split into contiguous chunks across
/// thread_count() threads. body must only write to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cyclestat
