#pragma once

// Index-parallel loops. Work is split into contiguous blocks, one per worker;
// callers write results into per-index slots or mergeable accumulators, so
// output never depends on the worker count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skewlab {

/// 0 means one worker per hardware thread.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls body(worker, begin, end) on disjoint blocks covering [0, count).
template <class Body>
void parallel_blocks(std::size_t count, unsigned workers, Body&& body) {
  const unsigned w = static_cast<unsigned>(
      std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1)));
  if (w <= 1) {
    body(0U, std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t begin = count * t / w;
    const std::size_t end = count * (t + 1) / w;
    pool.emplace_back([&, t, begin, end] {
      try {
        body(t, begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Calls body(i) for every i in [0, count).
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  parallel_blocks(count, workers, [&](unsigned, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

/// Number of blocks parallel_blocks will use; sizes per-worker accumulators.
inline unsigned block_count(std::size_t count, unsigned workers) {
  return static_cast<unsigned>(std::min<std::size_t>(
      resolve_workers(workers), std::max<std::size_t>(count, 1)));
}

}  // namespace skewlab
