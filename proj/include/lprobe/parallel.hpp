#pragma once

// Deterministic chunked parallelism. Work is split into fixed-size chunks
// whose decomposition does not depend on the worker count; callers store
// per-chunk partial results and reduce them in chunk order, so outputs are
// bit-identical for any thread budget. LPROBE_THREADS caps the budget.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lprobe {

inline int thread_budget() {
  static const int cached = [] {
    if (const char* env = std::getenv("LPROBE_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
  }();
  return cached;
}

namespace detail {
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// Calls fn(worker, chunk_index, begin, end) for every chunk of
/// [0, n_items). Nested calls run inline on the calling thread.
inline void parallel_chunks(
    std::size_t n_items, std::size_t chunk_size,
    const std::function<void(int, std::size_t, std::size_t, std::size_t)>& fn) {
  if (n_items == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  const int workers = std::min<std::size_t>(thread_budget(), n_chunks);

  if (workers <= 1 || detail::in_parallel_region()) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      fn(0, c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](int worker) {
    detail::in_parallel_region() = true;
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks || failed.load(std::memory_order_relaxed)) break;
      try {
        fn(worker, c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
    detail::in_parallel_region() = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run, t);
  run(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lprobe
