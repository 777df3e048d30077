#ifndef STABCP_PARALLEL_HPP
#define STABCP_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

// Embarrassingly parallel map over trial indices. Each trial owns its own
// derived RNG stream and writes into its own slot, so the result is
// byte-identical for any worker count.

namespace stabcp {

inline std::size_t resolve_workers(std::size_t workers) {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

template <typename T, typename Fn>
std::vector<T> parallel_map_trials(std::size_t trials, std::size_t workers, Fn&& fn) {
  std::vector<T> out(trials);
  workers = std::min(resolve_workers(workers), trials == 0 ? std::size_t{1} : trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) out[t] = fn(t);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        out[t] = fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace stabcp

#endif  // STABCP_PARALLEL_HPP
