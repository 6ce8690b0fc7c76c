// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace beamnull {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(begin, end) over disjoint chunks of [0, n). The partition depends
// only on (n, threads); callers keep results deterministic by writing to
// index-addressed slots.
template <typename Fn>
void parallel_chunks(size_t n, int threads, Fn&& fn) {
  int t = std::max(resolve_threads(threads), 1);
  if (n < static_cast<size_t>(t)) t = static_cast<int>(n);
  if (t <= 1 || n == 0) {
    fn(size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const size_t chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const size_t begin = std::min(n, i * chunk);
    const size_t end = std::min(n, begin + chunk);
    if (begin == end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace beamnull
