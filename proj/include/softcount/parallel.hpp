#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace softcount {

/**
 * Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
 * Each index must write only to its own output slot. If any call throws, the
 * exception from the lowest failing index is rethrown after all workers stop.
 */
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t max_threads = 0) {
    if (count == 0) return;
    std::size_t threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    std::vector<std::exception_ptr> errors(count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        pool.clear();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace softcount
