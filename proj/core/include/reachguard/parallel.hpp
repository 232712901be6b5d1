#pragma once

#include <cstddef>
#include <functional>

namespace reachguard {

// Number of workers actually used for a requested thread count
// (0 = hardware concurrency, floored at 1).
int resolve_threads(int requested);

// Runs fn(begin, end) over a partition of [0, n) on `threads` workers and
// joins. Work must be independent per index so results cannot depend on
// the partition.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace reachguard
