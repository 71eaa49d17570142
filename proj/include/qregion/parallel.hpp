#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qregion {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// is handled exactly once; callers must write results to disjoint slots.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sum of chunk results in fixed chunk order. Chunk boundaries and the wave
/// size do not depend on the thread count, so the floating-point result is
/// bit-identical for any `threads`.
template <class T, class ChunkFn>
T ordered_chunk_sum(std::size_t count, std::size_t chunk_size, int threads, T zero, ChunkFn&& chunk) {
  constexpr std::size_t kWave = 16;
  const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
  T total = zero;
  std::vector<T> partial(kWave, zero);
  for (std::size_t first = 0; first < chunks; first += kWave) {
    const std::size_t n = std::min(kWave, chunks - first);
    parallel_for(n, threads, [&](std::size_t j) {
      const std::size_t c = first + j;
      const std::size_t begin = c * chunk_size;
      const std::size_t end = std::min(count, begin + chunk_size);
      partial[j] = chunk(begin, end);
    });
    for (std::size_t j = 0; j < n; ++j) total += partial[j];
  }
  return total;
}

inline int default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qregion
