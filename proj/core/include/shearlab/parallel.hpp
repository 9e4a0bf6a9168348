#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shearlab {

/// Runs fn(begin, end, worker) over contiguous chunks of [0, n).
///
/// Chunks are assigned statically, so a caller that writes results by index
/// gets output that does not depend on the worker count. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    fn(std::size_t{0}, n, 0);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t id = 0; id < w; ++id) {
    const std::size_t begin = std::min(n, id * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&, begin, end, id] {
      try {
        fn(begin, end, static_cast<int>(id));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace shearlab
