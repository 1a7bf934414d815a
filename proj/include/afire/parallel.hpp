#pragma once

#include <cstddef>
#include <functional>

namespace afire {

/// Number of worker threads used by the parallel loops. Defaults to the
/// hardware concurrency and can be overridden with the AFIRE_THREADS
/// environment variable (values < 1 clamp to 1).
std::size_t thread_count();

/// Runs fn(begin, end) over contiguous chunks of [0, n) on the worker
/// threads. Chunk boundaries depend only on n and the grain, not on the
/// thread count, so reductions that sum per-chunk results in index order
/// stay bit-stable across machines with different core counts.
void parallel_for_chunks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn);

/// Convenience wrapper: one chunk per worker.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace afire
