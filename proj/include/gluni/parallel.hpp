#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gluni {

// Worker cap shared by every parallel loop; 0 means hardware concurrency.
void set_max_threads(unsigned n);
[[nodiscard]] unsigned max_threads();

// Runs body(i) for i in [0, n). Chunks are fixed by (n, threads) only, so any
// per-index output is independent of scheduling. Reductions are done by the
// caller over the per-index results in index order.
// Counter of the current thread, advanced before every parallel_for index and
// after every loop. Per-thread caches keyed on it never leak state between
// indices, so results do not depend on how indices are split across threads.
[[nodiscard]] std::uint64_t task_epoch();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gluni
