#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dvino {

inline unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

/// Runs body(chunk_index, begin, end) over `chunks` equal slices of [0, count).
/// Callers write into per-chunk slots and merge in chunk order, so results do
/// not depend on the thread count.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned threads, Body&& body) {
  chunks = std::max<std::size_t>(1, std::min(chunks, std::max<std::size_t>(count, 1)));
  auto run_chunk = [&](std::size_t c) {
    std::size_t begin = count * c / chunks;
    std::size_t end = count * (c + 1) / chunks;
    body(c, begin, end);
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
          try {
            run_chunk(c);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace dvino
