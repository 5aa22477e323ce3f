#include "cellhom/concurrency.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cellhom {

int env_parallelism() {
  const char* v = std::getenv("CELLHOM_THREADS");
  if (!v) return 1;
  int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int k = std::min<int>(threads, static_cast<int>(n));
  pool.reserve(k);
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace cellhom
