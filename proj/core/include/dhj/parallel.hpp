#pragma once

#include <cstddef>
#include <functional>

namespace dhj {

// Worker count used by node-parallel loops. DHJ_THREADS caps it; the
// hardware concurrency is the default. Always >= 1.
int thread_count();

// Runs fn(i) for every i in [0, n), splitting the range into contiguous
// blocks over the worker threads. fn must only write state owned by its
// index. Exceptions thrown by fn are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dhj
