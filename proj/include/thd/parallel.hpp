#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace thd {

// Process-wide worker bound; 0 means hardware concurrency.
inline std::size_t& thread_limit() {
    static std::size_t limit = 0;
    return limit;
}

inline void set_thread_limit(std::size_t n) { thread_limit() = n; }

inline std::size_t effective_threads() {
    std::size_t n = thread_limit();
    if (n == 0) n = std::thread::hardware_concurrency();
    return std::max<std::size_t>(1, n);
}

// Runs fn(begin, end) over fixed-size chunks of [0, n). The chunk grid is a
// function of n and chunk only, never of the worker count, so work that
// writes disjoint per-chunk outputs produces identical results for any
// --threads setting.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t chunk, Fn&& fn) {
    if (n == 0) return;
    chunk = std::max<std::size_t>(1, chunk);
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    const std::size_t workers = std::min(effective_threads(), nchunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            fn(c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;

    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= nchunks || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                if (!error_claimed.test_and_set()) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace thd
