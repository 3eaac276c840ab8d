#include "pglab/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pglab {

namespace {
std::atomic<int> g_workers{1};
thread_local bool t_inside_parallel = false;
}

int worker_count() { return g_workers.load(); }

void set_worker_count(int n) { g_workers.store(std::max(1, n)); }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int workers = std::min<std::int64_t>(worker_count(), n);
  // Nested regions run serially; the outermost loop owns the workers.
  if (workers <= 1 || t_inside_parallel) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    t_inside_parallel = true;
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pglab
