#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cvrelay {

// Worker count for parallel maps: hardware concurrency, capped by the
// CVRELAY_THREADS environment variable and by the job count.
inline int thread_budget(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CVRELAY_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned long>(cap) < n) n = static_cast<unsigned>(cap);
  }
  if (jobs < n) n = static_cast<unsigned>(jobs);
  return static_cast<int>(n == 0 ? 1 : n);
}

// Runs fn(i) for i in [0, jobs) on a transient worker pool. Callers index
// their own output buffers, so results are positionally deterministic no
// matter how indices are scheduled across threads.
template <typename Fn>
void parallel_for_indexed(std::size_t jobs, Fn&& fn) {
  const int workers = thread_budget(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cvrelay
