#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace prodense {

/// Resource caps shared by the library. Every operation that can blow up
/// takes one of these and throws BudgetExceeded instead of running away.
struct Limits {
    std::size_t max_value_bits = std::size_t{1} << 20;   // per big number
    std::uint64_t max_cells = std::uint64_t{1} << 28;    // per point set
    std::uint64_t max_nodes = 50'000'000;                // per search
    unsigned threads = 1;
};

namespace detail {

// Runs fn(0..count-1) on up to `threads` workers. Each index is handled by
// exactly one worker, so callers writing to slot i get deterministic output.
// If several indices throw, the exception of the lowest index is rethrown.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> failures(count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) {
                    try {
                        fn(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
}

}  // namespace detail
}  // namespace prodense
