#pragma once

#include <cstddef>
#include <functional>

namespace srcloc {

/// Worker count used by parallel_for. 0 restores the default
/// (std::thread::hardware_concurrency()); 1 runs everything inline.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Calls body(i) for i in [0, count). Iterations must be independent; callers
/// write results into per-index slots so the outcome never depends on the
/// schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace srcloc
