#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "prodres/linalg.hpp"

namespace prodres {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(0..count-1) on a bounded worker pool. Items must be independent;
// callers write results into index-addressed slots so the outcome does not
// depend on scheduling. The first exception aborts the remaining work and is
// rethrown on the calling thread.
inline void parallel_for_index(Index count, int threads,
                               const std::function<void(Index)>& fn) {
    threads = resolve_thread_count(threads);
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<bool> abort{false};

    auto worker = [&]() {
        while (!abort.load(std::memory_order_relaxed)) {
            const Index i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const int n_workers = static_cast<int>(std::min<Index>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace prodres
