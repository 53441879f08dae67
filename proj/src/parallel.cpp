#include "refinery/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace refinery {

std::size_t effective_threads(std::size_t n_items) {
  std::size_t cap = 0;
  if (const char* env = std::getenv("REFINERY_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end && *end == '\0') cap = static_cast<std::size_t>(parsed);
  }
  if (cap == 0) {
    cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  // Not worth spinning threads for tiny workloads.
  constexpr std::size_t kMinItemsPerThread = 2048;
  const std::size_t useful = std::max<std::size_t>(1, n_items / kMinItemsPerThread);
  return std::max<std::size_t>(1, std::min(cap, useful));
}

void parallel_fill(std::size_t n, std::vector<double>& out,
                   const std::function<double(std::size_t)>& fn) {
  out.resize(n);
  const std::size_t workers = effective_threads(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace refinery
