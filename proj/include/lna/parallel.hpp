#pragma once

#include <cstddef>
#include <functional>

namespace lna {

// Worker count: hardware concurrency, capped by the LNA_THREADS env var.
unsigned worker_count();

// Calls fn(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker; fn must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lna
