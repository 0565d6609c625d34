#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cohort::detail {

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so callers writing to per-index slots need no locking. The first exception
/// thrown by any chunk is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, std::size_t min_chunk = 64)
{
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    auto workers = std::min<std::size_t>(threads, std::max<std::size_t>(1, n / min_chunk));
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        auto chunk = (n + workers - 1) / workers;
        for (std::size_t begin = 0; begin < n; begin += chunk) {
            auto end = std::min(n, begin + chunk);
            pool.emplace_back([&, begin, end] {
                try {
                    fn(begin, end);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace cohort::detail
