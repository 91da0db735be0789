#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kpeaks {

/// Number of worker threads used by parallel loops (at least 1).
int thread_count();

void set_thread_count(int n);

/// Runs body(block) for block in [0, blocks); blocks are distributed statically.
void parallel_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body);

/// Block length of deterministic reductions; partial sums never depend on the thread count.
constexpr std::size_t reduction_block = 4096;

/// Sum of block_sum(begin, end) over fixed blocks of [0, n), combined in block order.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& block_sum);

} // namespace kpeaks
