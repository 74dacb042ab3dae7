#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace grafica {

/// Runs body(i) for i in [0, count) on up to n_threads threads. Each index is
/// claimed once via an atomic counter and must write only to its own output
/// slot, so results are identical to the serial schedule. n_threads <= 1 runs
/// inline. The first exception thrown by any body is rethrown to the caller.
inline void parallel_for(int count, int n_threads,
                         const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (n_threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int spawn = std::min(n_threads, count);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace grafica
