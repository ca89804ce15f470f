#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace nlwr {

/// Worker count: NLWR_THREADS if set to a positive integer, else hardware parallelism.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("NLWR_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// independent; the first exception per index is stored in `errors[i]`.
template <class Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t n, Fn&& fn, std::size_t workers = worker_count()) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::min(workers, n);
    if (workers <= 1) {
        worker();
        return errors;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return errors;
}

}  // namespace nlwr
