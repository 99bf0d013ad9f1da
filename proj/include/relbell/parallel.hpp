#ifndef RELBELL_PARALLEL_HPP
#define RELBELL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace relbell
{

/// Evaluates fn(0..n-1) on up to `jobs` threads. Results are stored by index,
/// so the output does not depend on scheduling. The first exception thrown by
/// any task is rethrown on the calling thread.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned jobs, Fn&& fn)
{
    using R = std::decay_t<decltype(fn(std::size_t{0}))>;
    std::vector<R> out(n);
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock{error_mutex};
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
    return out;
}

} // namespace relbell

#endif
