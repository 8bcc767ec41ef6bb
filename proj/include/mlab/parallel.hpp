#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mlab {

/// Runs fn(i) for i in [0, count) across up to `jobs` threads. Callers store
/// results into per-index slots, so the outcome is independent of scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned jobs = 0) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = hw ? hw : 1;
  jobs = std::min<std::size_t>(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mlab
