#pragma once

#include <cstddef>
#include <functional>

namespace heisenbound {

/// Number of worker threads used by parallel_for. Defaults to
/// std::thread::hardware_concurrency(); 0 restores the default.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls fn(i) for every i in [0, n). Indices are handed out in contiguous
/// chunks; fn must only write to per-index state so the result does not
/// depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace heisenbound
