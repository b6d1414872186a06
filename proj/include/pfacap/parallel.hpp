#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pfacap {

/// Process-wide override set by the command line; 0 means unset.
inline unsigned& thread_override() {
    static unsigned n = 0;
    return n;
}

/// Thread count: the override if set, else PFACAP_THREADS, else 1.
inline unsigned default_threads() {
    if (thread_override() > 0) return thread_override();
    if (const char* env = std::getenv("PFACAP_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled by exactly one worker; callers write results into per-index slots
/// and reduce afterwards in index order, so results do not depend on the
/// thread count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace pfacap
