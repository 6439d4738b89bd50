#include "semibound/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace semibound {

int default_workers() {
  if (const char* env = std::getenv("SEMIBOUND_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_blocks(std::size_t n, std::size_t block_size, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (block_size == 0) block_size = 1;
  if (workers <= 0) workers = default_workers();
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  if (workers == 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const std::size_t lo = b * block_size;
      fn(lo, std::min(n, lo + block_size));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::size_t lo = b * block_size;
      fn(lo, std::min(n, lo + block_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace semibound
