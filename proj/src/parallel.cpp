#include "gluni/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gluni {

namespace {
std::atomic<unsigned> g_threads{0};
thread_local std::uint64_t t_epoch = 0;
}

std::uint64_t task_epoch() { return t_epoch; }

void set_max_threads(unsigned n) { g_threads = n; }

unsigned max_threads() {
  unsigned n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) {
      ++t_epoch;
      body(i);
    }
    ++t_epoch;
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) {
          ++t_epoch;
          body(i);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  ++t_epoch;
  if (error) std::rethrow_exception(error);
}

}  // namespace gluni
