#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace semibound {

/// Worker-count default: SEMIBOUND_WORKERS env var, else hardware concurrency.
int default_workers();

/**
 * Runs fn(begin, end) over fixed-size index blocks, handed out dynamically
 * to `workers` threads.  The block partition is independent of the worker
 * count; callers write results into index-addressed storage so the final
 * reduction order is deterministic.
 */
void parallel_blocks(std::size_t n, std::size_t block_size, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace semibound
