#pragma once

// Thread-pool-free parallel_for: each call spawns up to htg::thread_count()
// workers over a blocked index range.  Workers write into disjoint slots, so
// results are bitwise identical for any thread count; reductions must be
// performed by the caller in fixed index order.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace htg {

inline int thread_count() {
  static int n = [] {
    if (const char* env = std::getenv("HTG_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 4;
  }();
  return n;
}

// fn(i) is invoked once for every i in [0, n); order within a block is
// ascending, blocks run concurrently.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int nt = std::min<std::size_t>(thread_count(), n ? n : 1);
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace htg
