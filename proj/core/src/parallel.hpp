#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pdm::detail {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, n) on up to `workers` threads, interleaved so
// that each index is handled exactly once. Results must be written to
// per-index slots; the first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                                               std::max<std::size_t>(n, 1));
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(nw);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += nw) body(i);
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

}  // namespace pdm::detail
