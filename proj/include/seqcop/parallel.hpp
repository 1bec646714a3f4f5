#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace seqcop {

/// Runs fn(0..count-1) on up to `degree` worker threads. Each index must
/// write only to its own output slot; callers aggregate afterwards in index
/// order, so results are identical for every degree.
inline void parallel_for(std::size_t count, unsigned degree,
                         const std::function<void(std::size_t)>& fn) {
    if (degree <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned nthreads = degree < count ? degree : static_cast<unsigned>(count);
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace seqcop
