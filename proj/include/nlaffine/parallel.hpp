#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlaffine {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(begin, end) on contiguous chunks of [0, n). Chunks are disjoint,
/// so results are independent of the thread count when fn writes per index.
/// The first exception thrown by a worker is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t t = std::min<std::size_t>(std::max(1U, threads), n == 0 ? 1 : n);
    if (t <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::exception_ptr error;
    std::mutex mu;
    {
        std::vector<std::jthread> pool;
        pool.reserve(t);
        const std::size_t chunk = (n + t - 1) / t;
        for (std::size_t k = 0; k < t; ++k) {
            const std::size_t b = k * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&fn, &error, &mu, b, e] {
                try {
                    fn(b, e);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!error) error = std::current_exception();
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace nlaffine
