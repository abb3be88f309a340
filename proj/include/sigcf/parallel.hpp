#pragma once

// Deterministic parallel execution over independent work items. Results are
// written into preallocated per-item slots and reduced by a fixed fan-in-2
// pairwise tree, so the outcome does not depend on the thread count.

#include <complex>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sigcf {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// f(i) is called once for every i in [0, n); items are chunked over threads.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr err;
    std::mutex err_mu;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t begin = n * t / nt;
        const std::size_t end = n * (t + 1) / nt;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) f(i);
            } catch (...) {
                std::scoped_lock lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Pairwise tree sum with fan-in 2; associative order is fixed by the data
// layout, not by the scheduler.
template <class T>
T pairwise_sum(const T* data, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T s = data[0];
        for (std::size_t i = 1; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

}  // namespace sigcf
