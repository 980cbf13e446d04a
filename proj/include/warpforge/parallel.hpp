#ifndef WARPFORGE_PARALLEL_HPP
#define WARPFORGE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "warpforge/types.hpp"

namespace warpforge {

/// Runs fn(i) for i in [0, count) on `workers` threads pulling indices from a
/// shared counter. With workers <= 1 everything runs on the calling thread.
/// The first exception thrown by any task is rethrown on the caller after all
/// threads join; remaining tasks are abandoned. Tasks must be independent:
/// results may only be written to per-index slots.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    require(workers >= 1, "parallel_for: workers must be >= 1");
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

/// Default worker count: logical cores, with a floor of 1.
inline int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace warpforge

#endif
