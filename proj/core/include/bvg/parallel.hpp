#pragma once

#include <cstddef>
#include <functional>

namespace bvg {

/// Number of worker threads used when a caller passes 0.
unsigned default_threads();

/// Runs fn(i) for i in [0, n). Indices are split into contiguous chunks, one
/// per thread; with threads <= 1 (or small n) it runs inline. Callers write
/// results into per-index slots and reduce afterwards in index order, which
/// keeps results independent of scheduling. The first exception thrown by any
/// worker is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace bvg
