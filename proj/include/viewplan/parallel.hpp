#pragma once

#include <cstddef>
#include <functional>

namespace viewplan {

/// Worker count: VIEWPLAN_THREADS when set (minimum 1), else the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is processed by
/// exactly one call, so writing results into slot i keeps output independent of scheduling.
/// The first exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace viewplan
