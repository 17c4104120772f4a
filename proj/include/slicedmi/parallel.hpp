#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace slicedmi::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// fn(i) for i in [0, count), split into contiguous chunks across workers.
// Work items must be independent and must not throw (callers catch inside
// fn and stash results by index); with that contract the outcome is the
// same for every thread count.
inline void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
  const int workers = std::min<std::int64_t>(resolve_threads(threads), count > 0 ? count : 1);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = count * w / workers;
    const std::int64_t hi = count * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace slicedmi::detail
