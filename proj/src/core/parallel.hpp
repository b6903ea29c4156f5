#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace wbwt {

// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
// worker. Falls back to a direct call for a single thread so call sites stay
// debuggable.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (n <= 0) return;
    int workers = std::max(1, std::min(threads, n));
    if (workers == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int begin = w * chunk;
        int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace wbwt
