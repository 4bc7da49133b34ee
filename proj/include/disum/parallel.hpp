#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace disum {

// 0 means "use whatever the machine offers", never less than one.
inline unsigned resolve_jobs(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Applies fn to every item and returns the results in input order, no
// matter how many worker threads ran.  The first exception thrown by a
// worker is rethrown on the calling thread after all workers join.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn&& fn, unsigned jobs)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using Out = std::invoke_result_t<Fn&, const T&>;
  std::vector<Out> results(items.size());
  jobs = resolve_jobs(jobs);
  if (jobs == 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  if (jobs > items.size()) jobs = static_cast<unsigned>(items.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= items.size()) return;
      try {
        results[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace disum
