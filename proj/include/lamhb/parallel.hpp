#pragma once

#include <cstddef>
#include <functional>

namespace lamhb {

/// Worker count for a --threads style value (0 = hardware concurrency).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace lamhb
