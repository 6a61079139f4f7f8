#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ssct {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, n). Each index owns its output slot, so the
// schedule does not affect results; ordered reductions are the caller's
// responsibility.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
}

}  // namespace ssct
