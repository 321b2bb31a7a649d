#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hdgflow {

/// Run fn(i) for i in [0, n) on a static partition over hardware threads.
/// Each index writes only its own output slot, so results are independent
/// of the thread count; callers accumulate in index order afterwards.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int nthreads = static_cast<int>(hw ? hw : 1u);
  if (n <= 1 || nthreads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nt = std::min(nthreads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nt);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += nt) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hdgflow
