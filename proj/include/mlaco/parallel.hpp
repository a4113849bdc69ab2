#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mlaco {

// Worker pool width: MLACO_THREADS when set, otherwise the hardware
// concurrency, never less than one.
inline int worker_count() {
    if (const char* env = std::getenv("MLACO_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<int>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [begin, end) across `threads` workers in
// contiguous chunks. The body must be safe to run concurrently for
// distinct indices.
inline void parallel_for(long begin, long end, int threads,
                         const std::function<void(long)>& body) {
    const long count = end - begin;
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (long i = begin; i < end; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<long>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const long chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = begin + w * chunk;
        const long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (long i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mlaco
