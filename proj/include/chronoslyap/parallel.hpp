#pragma once

#include <cstddef>
#include <functional>

namespace chronoslyap {

/// Worker count: CHRONOSLYAP_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads. Each index
/// runs exactly once; the exception of the lowest failing index is
/// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace chronoslyap
