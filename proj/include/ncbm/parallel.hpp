#pragma once

#include <cstddef>
#include <functional>

namespace ncbm {

/// Worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, count) over a pool of worker threads, in
/// contiguous blocks. Callers write results into per-index slots, so
/// outputs do not depend on the thread count. The first exception thrown
/// by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ncbm
