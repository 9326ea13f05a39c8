#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ctlab {

// Thread count resolution: explicit request > CTLAB_THREADS env > hardware.
int resolve_thread_count(int requested);

// Runs body(i) for i in [0, count). With threads <= 1 this is a plain loop.
// Scheduling is dynamic, so bodies must write only to their own slot; the
// caller gets determinism by reducing the slots in a fixed order afterwards.
// The first exception thrown by any body is rethrown after all workers join.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& body) {
    if (count <= 0) return;
    if (threads > count) threads = count;
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> hold(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve((std::size_t)threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace ctlab
