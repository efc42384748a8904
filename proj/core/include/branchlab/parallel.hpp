#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace branchlab {

// Process-wide cap on helper threads (CLI --workers). 0 means hardware default.
void set_worker_cap(int workers);
int worker_cap();

// Runs fn(i) for i in [0, n). Tasks are claimed from a shared counter and the
// caller sees no ordering guarantees during execution; callers that collect
// results must index into a preallocated vector so output order is fixed
// regardless of the worker count.
template <typename Fn>
void parallel_for_indexed(std::size_t n, Fn&& fn) {
  int cap = worker_cap();
  std::size_t threads = cap > 0 ? static_cast<std::size_t>(cap)
                                : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace branchlab
