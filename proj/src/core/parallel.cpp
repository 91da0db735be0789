#include "kpeaks/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace kpeaks {

namespace {
std::atomic<int> g_threads{1};
}

int
thread_count()
{
    return g_threads.load();
}

void
set_thread_count(int n)
{
    g_threads.store(std::max(1, n));
}

void
parallel_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body)
{
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            body(b);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t b = t; b < blocks; b += workers) {
                body(b);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

double
deterministic_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& block_sum)
{
    std::size_t blocks = (n + reduction_block - 1) / reduction_block;
    std::vector<double> partial(blocks, 0.0);
    parallel_blocks(blocks, [&](std::size_t b) {
        std::size_t begin = b * reduction_block;
        std::size_t end = std::min(n, begin + reduction_block);
        partial[b] = block_sum(begin, end);
    });
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

} // namespace kpeaks
