#pragma once

// Minimal chunked parallel-for. Work is split into fixed contiguous ranges so
// results never depend on scheduling; callers merge in index order.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace semac::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SEMAC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& body) {
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n ? n : 1)));
    if (t == 1 || n == 0) {
        body(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (int w = 0; w < t; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&body, w, lo, hi] { body(w, lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace semac::detail
