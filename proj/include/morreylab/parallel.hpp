#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace morreylab {

// Effective worker count: explicit override > MORREYLAB_THREADS > hardware.
int thread_count();

// Override the worker count for this process (0 clears the override).
void set_thread_override(int n);

namespace detail {
inline std::size_t chunk_count(std::size_t count) {
  // Fixed partition independent of the worker count, so reductions merge
  // in the same order no matter how many threads run them.
  constexpr std::size_t kMaxChunks = 64;
  return count < kMaxChunks ? count : kMaxChunks;
}
}  // namespace detail

// Deterministic chunked reduction over [0, count).
//
// The index range is split into a fixed set of contiguous chunks (independent
// of the thread count). Each chunk is mapped serially by `map(begin, end)`;
// chunk results are folded with `merge(acc, chunkResult)` in chunk order.
// The returned value is therefore identical for any number of workers.
template <typename T, typename Map, typename Merge>
T chunked_reduce(std::size_t count, T init, Map map, Merge merge) {
  if (count == 0) return init;

  const std::size_t chunks = detail::chunk_count(count);
  const int workers_wanted = thread_count();
  const std::size_t workers =
      std::min<std::size_t>(chunks, workers_wanted < 1 ? 1 : workers_wanted);

  std::vector<T> partial(chunks, init);
  const std::size_t base = count / chunks;
  const std::size_t rem = count % chunks;
  auto chunk_range = [&](std::size_t c) {
    const std::size_t begin = c * base + std::min(c, rem);
    const std::size_t end = begin + base + (c < rem ? 1 : 0);
    return std::pair<std::size_t, std::size_t>(begin, end);
  };

  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = chunk_range(c);
      partial[c] = map(b, e);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) break;
        auto [b, e] = chunk_range(c);
        partial[c] = map(b, e);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  T acc = init;
  for (std::size_t c = 0; c < chunks; ++c) merge(acc, partial[c]);
  return acc;
}

}  // namespace morreylab
