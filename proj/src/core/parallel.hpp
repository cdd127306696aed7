#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bohmex {

inline int thread_count() {
    if (const char* env = std::getenv("BOHMEX_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace detail {
inline thread_local bool in_parallel_worker = false;
}

// Chunked index-parallel loop. Workers pull chunks off a shared counter, so
// results must be written to per-index slots; reductions happen afterwards in
// index order to keep every run bit-reproducible. Nested calls degrade to the
// serial path instead of oversubscribing.
inline void parallel_for(long n, const std::function<void(long)>& body, int chunk = 1) {
    if (n <= 0) return;
    int workers = std::min<long>(thread_count(), (n + chunk - 1) / chunk);
    if (workers <= 1 || detail::in_parallel_worker) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            detail::in_parallel_worker = true;
            for (;;) {
                long start = next.fetch_add(chunk);
                if (start >= n || failed.load(std::memory_order_relaxed)) return;
                long stop = std::min(n, start + chunk);
                for (long i = start; i < stop; ++i) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        failed.store(true, std::memory_order_relaxed);
                        return;
                    }
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace bohmex
