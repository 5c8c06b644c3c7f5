#pragma once

#include <cstddef>
#include <functional>

namespace homotopy {

/// Worker count: HOMOTOPY_THREADS when set to a positive integer, else hardware concurrency.
std::size_t worker_count();

/// Runs body(0..count-1) on a bounded pool of worker_count() threads. Calls nested inside a
/// worker run inline. The exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace homotopy
