#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wfsim {

/// Resolve a user thread count; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Run body(i) for i in [0, n). Each index must write only its own output slot;
/// the first exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    pool.clear(); // joins
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace wfsim
