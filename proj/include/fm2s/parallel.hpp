#pragma once

#include <thread>
#include <vector>

namespace fm2s {

// Static contiguous partition of [begin, end) over at most `threads`
// workers. Each index is handled exactly once and the partition depends
// only on the range and thread count, so results are scheduling-free.
template <typename Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  const int n = end - begin;
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    const int lo = begin + static_cast<int>(static_cast<long long>(n) * t / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(n) * (t + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fm2s
