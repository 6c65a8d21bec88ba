#pragma once

// Deterministic task fan-out: tasks are indexed, each worker writes only its
// own slots, and the caller combines slots in index order.  The schedule of
// which thread runs which task never influences a result.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace subpress {

inline void run_indexed(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  const std::size_t workers =
      threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_guard;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_guard);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace subpress
