#pragma once

#include <cstddef>
#include <functional>

namespace discrimax {

/// Worker count: DISCRIMAX_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads with a static
/// partition. Results must be written to per-index slots, which keeps output
/// independent of the thread count. Nested calls run serially. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace discrimax
