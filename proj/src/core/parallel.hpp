#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gfd {

// Thread cap from GF_THREADS, else hardware concurrency.
unsigned thread_count();

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n). The chunk layout depends only on
// n and grain, so per-chunk partial results combined in chunk order are thread-count independent.
void parallel_chunks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t n, std::size_t grain) { return (n + grain - 1) / grain; }

template <class T, class F>
T parallel_sum(std::size_t n, std::size_t grain, F&& body) {
  std::vector<T> part(chunk_count(n, grain), T{});
  parallel_chunks(n, grain, [&](std::size_t c, std::size_t b, std::size_t e) {
    T acc{};
    for (std::size_t i = b; i < e; ++i) acc += body(i);
    part[c] = acc;
  });
  T total{};
  for (const T& p : part) total += p;
  return total;
}

}  // namespace gfd
