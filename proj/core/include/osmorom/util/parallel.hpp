#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace osmorom::util {

/// Runs body(k) for k in [0, n) on `workers` threads with a static
/// round-robin schedule. The body must not throw.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(w, n); ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t k = t; k < n; k += w) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace osmorom::util
