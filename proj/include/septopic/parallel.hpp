#pragma once

// Minimal block-parallel helper.
//
// Work is always partitioned by OWNED OUTPUT RANGE (e.g. rows of C), never by
// interleaved accumulation, so results are bit-identical for any thread count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace septopic {

/// Resolves a requested worker count: 0 means "all available cores".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over contiguous blocks of [0, total) on up to
/// `threads` workers.  Each index belongs to exactly one block, so writes to
/// per-index outputs need no synchronization.
template <typename Fn>
void parallel_blocks(std::size_t total, int threads, Fn&& fn) {
  int n = std::max(1, resolve_threads(threads));
  if (total == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n), total);
  if (workers <= 1) {
    fn(std::size_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::size_t chunk = (total + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(total, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace septopic
