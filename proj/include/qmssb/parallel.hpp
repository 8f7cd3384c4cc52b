#pragma once

#include <cstddef>
#include <functional>

namespace qmssb {

/// Worker count from QMSSB_WORKERS, else hardware concurrency (at least 1).
unsigned default_workers();

/// Resolves 0 to default_workers().
unsigned resolve_workers(unsigned requested);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Items are pulled
/// dynamically; callers write results into per-index slots and reduce in index
/// order afterwards. When items throw, the exception of the lowest failing index is rethrown,
/// so error reporting does not depend on the schedule either.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)> &body);

}  // namespace qmssb
