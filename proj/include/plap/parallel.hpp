// Thread-pool-free parallel loops over index ranges.
//
// All reductions use a fixed chunk size independent of the worker count, and
// partial results are combined in chunk order, so every result is bitwise
// identical no matter how many workers run.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace plap {

namespace detail {
inline std::atomic<int> g_workers{0};
}

inline int worker_count() {
    const int w = detail::g_workers.load(std::memory_order_relaxed);
    if (w > 0) return w;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// n <= 0 restores the hardware default.
inline void set_worker_count(int n) {
    detail::g_workers.store(n, std::memory_order_relaxed);
}

inline constexpr std::int64_t kReduceChunk = 1 << 15;

// Runs fn(begin, end) over disjoint subranges of [0, n).
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
    const int workers = std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(n, 1));
    if (workers <= 1 || n < 2 * kReduceChunk) {
        if (n > 0) fn(std::int64_t{0}, n);
        return;
    }
    const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            const std::int64_t b = c * kReduceChunk;
            fn(b, std::min(n, b + kReduceChunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

// Deterministic sum of eval(i) over [0, n): per-chunk serial sums combined in
// chunk order.
template <class Eval>
double parallel_sum(std::int64_t n, Eval&& eval) {
    if (n <= 0) return 0.0;
    const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
        while (b < e) {
            const std::int64_t c = b / kReduceChunk;
            const std::int64_t stop = std::min(e, (c + 1) * kReduceChunk);
            double s = 0.0;
            for (std::int64_t i = b; i < stop; ++i) s += eval(i);
            partial[static_cast<std::size_t>(c)] += s;
            b = stop;
        }
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

// Deterministic max of eval(i) over [0, n); returns lowest() for n == 0.
template <class Eval>
double parallel_max(std::int64_t n, Eval&& eval) {
    const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(static_cast<std::size_t>(std::max<std::int64_t>(nchunks, 1)),
                                -std::numeric_limits<double>::infinity());
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
        while (b < e) {
            const std::int64_t c = b / kReduceChunk;
            const std::int64_t stop = std::min(e, (c + 1) * kReduceChunk);
            double m = partial[static_cast<std::size_t>(c)];
            for (std::int64_t i = b; i < stop; ++i) m = std::max(m, eval(i));
            partial[static_cast<std::size_t>(c)] = m;
            b = stop;
        }
    });
    double total = -std::numeric_limits<double>::infinity();
    for (double m : partial) total = std::max(total, m);
    return total;
}

}  // namespace plap
