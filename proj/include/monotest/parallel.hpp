#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace monotest {

/// Number of worker threads used by replication-parallel loops.
[[nodiscard]] inline unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

/// Splits [0, total) into fixed-size chunks and calls
/// fn(chunk_index, begin, end) for each, possibly concurrently. Chunk
/// boundaries depend only on `total` and `chunk`, so results written by
/// chunk index are identical for any thread count.
template <typename Fn>
void for_each_chunk(std::size_t total, std::size_t chunk, Fn&& fn) {
  if (total == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (total + chunk - 1) / chunk;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n_chunks));

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    fn(static_cast<std::uint64_t>(c), begin, std::min(total, begin + chunk));
  };

  if (threads <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace monotest
