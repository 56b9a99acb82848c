#pragma once

#include <cstddef>
#include <functional>

namespace commfact {

/// Worker count from the COMMFACT_THREADS environment variable, falling
/// back to the hardware concurrency (at least 1).
std::size_t thread_count_from_env();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once. The first exception thrown by any body is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace commfact
