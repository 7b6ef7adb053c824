#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace koopsub::detail {

// Runs fn(i) for i in [0, n) on up to `threads` workers with a fixed
// interleaved assignment. Exceptions are rethrown for the lowest failing
// index, so failures surface the same way for every thread count.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) guarded(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) guarded(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace koopsub::detail
