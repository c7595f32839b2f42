#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace scatter_sense {

// Worker count: SCATTER_SENSE_THREADS if set to a positive integer, else hardware concurrency.
std::size_t thread_count();

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend only on n and
// the worker count, and callers write into per-index slots, so output order is deterministic.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        std::size_t slot = 0;
        for (std::size_t begin = 0; begin < n; begin += chunk, ++slot) {
            const std::size_t end = std::min(n, begin + chunk);
            pool.emplace_back([&fn, &errors, slot, begin, end] {
                try {
                    fn(begin, end);
                } catch (...) {
                    errors[slot] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace scatter_sense
