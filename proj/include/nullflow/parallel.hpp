#pragma once

#include <cstddef>
#include <functional>

namespace nullflow {

/// Worker cap: NULLFLOW_THREADS if set (>=1), else min(hardware, 8).
unsigned worker_count();

/// Runs fn(i) for i in [0, n). Chunks are contiguous and each index is
/// processed exactly once by one worker, so outputs written per index are
/// deterministic regardless of the worker count. Reductions stay with the
/// caller. Falls back to a serial loop for small n or a single worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nullflow
