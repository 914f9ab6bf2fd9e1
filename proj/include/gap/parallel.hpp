#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gap {

inline int worker_count() {
  if (const char* env = std::getenv("GAP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(chunk_index) for chunk_index in [0, n_chunks). Chunks are claimed
// dynamically, so fn must not depend on which worker runs it; results that
// need a fixed reduction order should be stored per chunk and merged serially
// by the caller.
template <typename F>
void parallel_chunks(int n_chunks, F&& fn) {
  if (n_chunks <= 0) return;
  const int workers = std::min(worker_count(), n_chunks);
  if (workers <= 1) {
    for (int i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto run = [&]() {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_chunks) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

// Data-parallel loop over [begin, end) with a fixed grain, independent bodies.
template <typename F>
void parallel_for(int begin, int end, F&& fn, int grain = 256) {
  const int n = end - begin;
  if (n <= 0) return;
  const int n_chunks = (n + grain - 1) / grain;
  parallel_chunks(n_chunks, [&](int chunk) {
    const int lo = begin + chunk * grain;
    const int hi = std::min(end, lo + grain);
    for (int i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace gap
