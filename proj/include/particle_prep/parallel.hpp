#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pprep {

/// Worker count used by parallel_for; 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is written by
/// exactly one worker, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, const Fn& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace pprep
