#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cvfp {

/// Runs body(begin, end) over fixed-size blocks of [0, n). Block boundaries do
/// not depend on the worker count, so any body that writes only to slots of
/// its own indices produces identical results for every `threads` value.
/// The first exception thrown by a worker is rethrown on the caller.
template <class Body>
void parallel_blocks(std::size_t n, std::size_t block, int threads, Body&& body) {
    if (n == 0) return;
    block = std::max<std::size_t>(block, 1);
    const std::size_t nblocks = (n + block - 1) / block;
    const auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * block;
        body(b, begin, std::min(n, begin + block));
    };
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), nblocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < nblocks; b += workers) {
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cvfp
