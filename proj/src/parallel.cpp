#include "fmca/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fmca {

namespace {
std::atomic<std::size_t> g_limit{0};
thread_local bool t_inside = false; // nested loops run inline
} // namespace

void set_max_threads(std::size_t n) { g_limit = n; }

std::size_t max_threads() {
  const std::size_t n = g_limit.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(max_threads(), count);
  if (workers <= 1 || t_inside) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto run = [&] {
    t_inside = true;
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
    t_inside = false;
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

} // namespace fmca
