#pragma once

#include <cstddef>
#include <functional>

namespace kikuchi {

/// Worker cap for parallel_for. Defaults to KIKUCHI_THREADS if set, else the
/// hardware concurrency.
void set_thread_count(std::size_t n);
[[nodiscard]] std::size_t thread_count();

/// Runs f(0..n-1) on up to thread_count() threads. Results must be written
/// by index so the outcome does not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace kikuchi
