#pragma once

#include <cstddef>
#include <functional>

namespace ctrans {

// Worker count from CTRANS_THREADS, else the hardware concurrency.
std::size_t worker_count();

// Runs body(begin, end) on contiguous chunks of [0, n). Chunks never overlap,
// so bodies that write only to their own indices give order-stable results.
// The exception from the lowest-indexed failing chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ctrans
