// Deterministic data-parallel helper: results land in caller-owned slots
// indexed by the loop variable, so scheduling never affects output.
#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace circlelab {

// Global worker cap (set from the CLI --threads flag). 0 = hardware default.
int& thread_cap();

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    std::size_t workers = thread_cap() > 0
                              ? static_cast<std::size_t>(thread_cap())
                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace circlelab
