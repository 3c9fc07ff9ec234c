#pragma once

#include <cstddef>
#include <functional>

namespace homflow {

/// Worker count from HOMFLOW_THREADS (unset or 0: hardware concurrency).
int default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0: default).
/// Each index runs exactly once; results must be written to per-index
/// slots so the outcome does not depend on scheduling. If bodies throw, one
/// of the exceptions is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace homflow
