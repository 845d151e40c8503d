#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace sphlab::detail {

// Splits [0, n) into `workers` contiguous ranges and runs fn(begin, end) on each,
// the calling thread taking the first range.
template<typename Fn>
void for_each_range(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2 * workers) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t step = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * step);
        const std::size_t end = std::min(n, begin + step);
        if (begin < end)
            pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(std::size_t{0}, std::min(n, step));
}

}  // namespace sphlab::detail
