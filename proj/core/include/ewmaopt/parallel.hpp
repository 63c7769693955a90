#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ewmaopt {

/// Number of worker threads to use: `requested`, or the hardware count when 0.
unsigned resolve_threads(unsigned requested) noexcept;

/// Splits [0, n) into contiguous blocks and runs body(begin, end) on each,
/// using up to `threads` std::threads. Exceptions from a block are rethrown
/// on the calling thread.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise summation in a fixed order, so the result does not depend on how
/// the values were produced.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace ewmaopt
