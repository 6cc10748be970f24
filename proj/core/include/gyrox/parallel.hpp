#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gyrox {

/// Worker count for intra-run parallelism: GYROX_THREADS if set and positive, else 1.
int default_threads();

/// Runs fn(begin, end) over `threads` contiguous chunks of [0, n). Chunk bounds
/// depend only on (n, threads); callers that write disjoint outputs get
/// schedule-independent results.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    std::size_t slot = 0;
    for (std::size_t begin = 0; begin < n; begin += chunk, ++slot) {
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&fn, &errors, slot, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[slot] = std::current_exception();
        }
      });
    }
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace gyrox
