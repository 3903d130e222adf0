#pragma once

#include <cstddef>
#include <functional>

namespace saddle {

/// Worker count: hardware concurrency, capped by SADDLE_ESCAPE_THREADS when
/// that variable holds a positive integer.
[[nodiscard]] unsigned worker_count();

/// Calls body(i) for i in [0, n) on up to `workers` threads. Each index runs
/// exactly once; the first exception thrown by a body is rethrown after all
/// workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned workers = worker_count());

}  // namespace saddle
