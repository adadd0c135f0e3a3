#pragma once

#include <cstddef>
#include <functional>

namespace specinv {

/// Worker count: SPECTRA_INVERT_THREADS when set and positive, otherwise the
/// hardware concurrency (0 in the variable also means "auto").
unsigned worker_count();

/// Runs body(i) for i in [0, n). Results must be written to caller-owned
/// slots indexed by i so assembly order does not depend on scheduling.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace specinv
