#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace radiomap {

// Resolve a requested worker count: 0 means "use hardware concurrency".
// The RADIOMAP_THREADS environment variable, when set, caps the result.
inline int resolve_thread_count(int requested) {
    int n = requested;
    if (n <= 0) {
        n = int(std::thread::hardware_concurrency());
        if (n < 1) n = 1;
    }
    if (const char* cap = std::getenv("RADIOMAP_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1 && c < n) n = c;
    }
    return n;
}

// Run fn(begin, end) over contiguous chunks of [0, count) on `threads`
// workers. Chunking never affects results; callers write disjoint rows.
template <class Fn>
void parallel_chunks(int count, int threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads > count) threads = count;
    if (threads <= 1) {
        fn(0, count);
        return;
    }

    std::vector<std::thread> workers;
    workers.reserve(std::size_t(threads));
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const int base = count / threads;
    const int extra = count % threads;
    int begin = 0;
    for (int t = 0; t < threads; ++t) {
        const int len = base + (t < extra ? 1 : 0);
        const int end = begin + len;
        workers.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace radiomap
