#pragma once

#include <cstddef>
#include <functional>

namespace quaysched {

/// Worker cap from the QUAYSCHED_THREADS env var; 0 or unset means hardware concurrency.
int thread_cap();

/// Runs fn(0..n-1) across up to max_threads workers (0 = thread_cap()). Each index owns
/// its output slot, so results are identical for any worker count; reductions belong to
/// the caller and must run in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int max_threads = 0);

}  // namespace quaysched
