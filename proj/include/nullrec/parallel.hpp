#pragma once

#include <cstddef>
#include <functional>

namespace nullrec {

/// Worker count: hardware concurrency, capped by NULLREC_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Tasks must write
/// only to their own slot; the first exception thrown is rethrown after all
/// workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nullrec
