#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"

namespace seqmine {

/// Worker count from SEQMINE_THREADS (0 or unset = hardware concurrency).
inline std::size_t thread_count() {
    const char* env = std::getenv("SEQMINE_THREADS");
    std::size_t requested = 0;
    if (env != nullptr && *env != '\0') {
        std::string s(env);
        if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6)
            throw Error(Errc::InvalidConfig, "SEQMINE_THREADS must be a non-negative integer");
        requested = static_cast<std::size_t>(std::stoul(s));
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

/// Runs fn(begin, end, worker) over contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the worker count; callers that write into
/// per-index slots or per-worker accumulators merged in worker order get the
/// same result for any thread count.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn, std::size_t workers = thread_count()) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        if (n > 0) fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, begin, end, w] {
            try {
                if (begin < end) fn(begin, end, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = thread_count()) {
    parallel_chunks(
        n,
        [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        },
        workers);
}

} // namespace seqmine
