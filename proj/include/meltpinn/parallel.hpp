#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "meltpinn/errors.hpp"

namespace meltpinn {

// Worker count from MELTPINN_THREADS; unset means the hardware concurrency.
inline int thread_count_from_env() {
  const char* v = std::getenv("MELTPINN_THREADS");
  if (!v || !*v) return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  require(*end == '\0' && n >= 1 && n <= 1024, std::string("MELTPINN_THREADS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first exception.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int workers = std::clamp(threads, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace meltpinn
