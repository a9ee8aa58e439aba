#pragma once

#include <cstddef>
#include <functional>

namespace metaforests {

// Process-wide cap on worker threads. 0 means "auto": the
// METAFORESTS_THREADS environment variable if set, otherwise
// hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(0..n-1) with each index executed exactly once. Work items must be
// independent and write only to their own slots; under that contract the
// result is identical for any thread count. Nested calls run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace metaforests
