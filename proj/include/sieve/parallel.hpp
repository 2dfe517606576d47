#pragma once

#include <cstddef>
#include <functional>

namespace sieve {

// Worker count from SIEVE_WORKERS (positive integer), otherwise the hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n) on up to `workers` threads (0: worker_count()). Every index runs
// exactly once; if any call throws, the exception of the smallest failing index is rethrown
// after all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace sieve
