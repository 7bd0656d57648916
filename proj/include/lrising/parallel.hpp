#pragma once

#include <cstddef>
#include <functional>

namespace lrising {

// Worker count from LRISING_THREADS, else hardware concurrency.
unsigned thread_count();

// Runs body(begin, end) over disjoint contiguous chunks of [0, n).
// Results must be written by index; callers reduce in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace lrising
