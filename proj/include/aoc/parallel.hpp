#pragma once

#include <cstddef>
#include <functional>

namespace aoc {

/// Worker count from AOC_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. The
/// first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace aoc
