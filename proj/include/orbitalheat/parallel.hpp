#pragma once

#include <cstddef>
#include <functional>

namespace oheat {

// Parallelism is capped by ORBITAL_HEAT_THREADS (0 or unset: hardware
// concurrency). All parallel loops write to preallocated per-index slots, so
// results are bit-identical for every thread count.

std::size_t thread_cap();

/// Override the environment cap programmatically (0 restores env behaviour).
void set_thread_cap(std::size_t n);

/// Run fn(i) for i in [0, n), statically chunked over worker threads.
/// fn must only touch state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace oheat
