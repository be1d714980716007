#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace heatsift {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Splits [0, n) into at most `workers` contiguous chunks and runs
// fn(begin, end) on each chunk in parallel. Chunk boundaries depend only on
// n and workers, and chunks write disjoint state, so results do not depend
// on scheduling. The first raised exception is rethrown on the caller.
template <typename Fn>
void parallel_chunks(std::size_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (n == 0) return;
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (chunks <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  pool.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t b = c * per;
    const std::size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&fn, &errors, c, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  try {
    fn(std::size_t{0}, std::min(n, per));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

// Per-index convenience wrapper over parallel_chunks.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  parallel_chunks(n, workers, [&fn](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace heatsift
