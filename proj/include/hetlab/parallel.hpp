#pragma once

#include <cstddef>
#include <functional>

namespace hetlab {

// Worker count: HETLAB_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
unsigned default_worker_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
// Exceptions thrown by body are rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace hetlab
