#pragma once

#include <functional>

namespace pdflow {

/// Worker count: min(hardware_concurrency, PDFLOW_THREADS when set).
int worker_count();

/// Runs f(i) for i in [0, n) across workers. Results must be written to
/// index-addressed slots; the call returns after all indices complete, so a
/// serial reduction over slots is deterministic.
void parallel_for(long n, const std::function<void(long)>& f);

}  // namespace pdflow
