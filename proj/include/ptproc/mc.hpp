#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

#include "ptproc/rng.hpp"

namespace ptproc::mc {

/* Worker threads to use: PTPROC_THREADS if set, else hardware concurrency. */
inline int worker_count() {
  if (const char* env = std::getenv("PTPROC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/* Deterministic parallel replicate runner.
 *
 * Replicates are processed in fixed blocks of kBlock consecutive indices;
 * each block produces its own partial result (Block must have merge(const
 * Block&)), and partials are merged in block order after all workers finish.
 * Every replicate draws from its own counter-seeded RNG. Together this makes
 * the final result bit-identical for any worker-thread count or schedule. */
inline constexpr std::uint64_t kBlock = 8192;

template <class Block, class Body>
Block run_replicates(std::uint64_t n, std::uint64_t master_seed, Body body,
                     int threads = 0) {
  if (threads <= 0) threads = worker_count();
  const std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<Block> partials(static_cast<std::size_t>(nblocks));
  std::atomic<std::uint64_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::uint64_t blk = next.fetch_add(1);
      if (blk >= nblocks) return;
      Block acc;
      std::uint64_t lo = blk * kBlock;
      std::uint64_t hi = std::min(n, lo + kBlock);
      for (std::uint64_t rep = lo; rep < hi; ++rep) {
        Rng rng = replicate_rng(master_seed, rep);
        body(acc, rep, rng);
      }
      partials[static_cast<std::size_t>(blk)] = std::move(acc);
    }
  };
  if (threads == 1 || nblocks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Block total;
  for (auto& b : partials) total.merge(b);
  return total;
}

}  // namespace ptproc::mc
