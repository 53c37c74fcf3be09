#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "kci/errors.hpp"

namespace kci {

// Worker count for embarrassingly parallel sweeps: hardware concurrency,
// capped by the KCI_THREADS environment variable when set.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int count = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("KCI_THREADS")) {
    try {
      size_t pos = 0;
      int cap = std::stoi(env, &pos);
      require(pos == std::string(env).size() && cap >= 1,
              "KCI_THREADS must be a positive integer");
      count = std::min(count, cap);
    } catch (const validation_error&) {
      throw;
    } catch (const std::exception&) {
      throw validation_error("KCI_THREADS must be a positive integer");
    }
  }
  return count;
}

// Run fn(i) for i in [0, n). Work items must be independent; results should be
// written into preassigned slots so the output does not depend on scheduling.
// The first exception thrown by any worker is rethrown after all join.
template <typename Fn>
inline void parallel_for(long n, Fn&& fn) {
  if (n <= 0) return;
  long workers = std::min<long>(worker_count(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&](long worker) {
    try {
      for (long i = worker; i < n; i += workers) {
        {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (first_error) return;
        }
        fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  for (long w = 0; w < workers; ++w) threads.emplace_back(body, w);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kci
