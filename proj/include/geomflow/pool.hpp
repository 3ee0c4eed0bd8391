#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace geomflow {

/// Worker-thread default: GEOMFLOW_THREADS, else 1.
inline int default_threads() {
    if (const char* env = std::getenv("GEOMFLOW_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

/// Runs body(begin, end) over a partition of [0, n). Each job writes only to
/// its own slots, so the partition (and thus the thread count) cannot change
/// any result; reductions happen afterwards in fixed slot order.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    if (threads <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + chunk);
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : workers) t.join();
}

}  // namespace geomflow
