#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace csma {

// Runs fn(i) for i in [0, count) on a small worker pool. Callers own output
// ordering by writing to index i; exceptions must be handled inside fn.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(hw == 0 ? 1 : hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace csma
