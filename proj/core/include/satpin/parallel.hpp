#pragma once

#include <cstddef>
#include <functional>

namespace satpin {

// Worker count: SATPIN_WORKERS if set and positive, else hardware concurrency.
unsigned default_worker_count();

// Runs body(i) for i in [begin, end) on up to `workers` threads. Iterations are
// split into contiguous chunks; body must only write to disjoint outputs.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace satpin
