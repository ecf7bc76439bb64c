#pragma once

#include <cstddef>
#include <functional>

namespace fiberot {

/// Worker cap from DOT_NUM_THREADS (defaults to hardware concurrency, min 1).
std::size_t max_threads();

/// Runs body(i) for i in [0, count). Each index is visited exactly once, so
/// results written by index are independent of scheduling. The first
/// exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fiberot
