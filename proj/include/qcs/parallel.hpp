#pragma once

// Deterministic data parallelism: work is split into fixed contiguous chunks
// and every result is written to its own slot, so outputs never depend on the
// number of workers or on scheduling.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qcs {

/// Worker count used by parallel_for. Defaults to hardware concurrency.
unsigned worker_count() noexcept;
void set_worker_count(unsigned count) noexcept;

/// Calls body(i) for i in [0, count). The first exception thrown by any
/// worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin >= end) {
                break;
            }
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) {
                        body(i);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace qcs
