#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace singcount {

/// Runs fn(worker, i) for i in [0, n), item i going to worker i % threads.
/// The assignment depends only on (threads, n), so per-worker partial results
/// combined in worker order are reproducible. The first exception (by worker
/// index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(unsigned threads, std::size_t n, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0U, i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(w, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace singcount
