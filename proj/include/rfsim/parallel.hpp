#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rfsim {

// Worker count for data-parallel loops. RFSIM_WORKERS overrides; defaults to
// the hardware concurrency capped at 8.
inline unsigned default_workers() {
    if (const char* env = std::getenv("RFSIM_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min(hw == 0 ? 1u : hw, 8u);
}

// Runs fn(i) for i in [0, n) split into contiguous chunks, one per worker.
// Every fn(i) must be independent of execution order; any cross-index
// reduction has to happen in the caller, indexed by i, so that results do
// not depend on the worker count.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for(n, default_workers(), fn);
}

}  // namespace rfsim
