#pragma once

// Minimal fork-join loop. Work items write to their own slots; callers reduce
// in index order so results do not depend on the thread count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace beamtie {

/// Thread cap from BEAMTIE_THREADS, else the hardware concurrency.
inline int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BEAMTIE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

template <class F>
void parallel_for(int count, F&& body) {
  const int threads = std::min(thread_count(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  int error_index = count;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) {
        try {
          body(i);
        } catch (...) {
          // keep the failure of the lowest index
          std::lock_guard<std::mutex> lock(guard);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace beamtie
