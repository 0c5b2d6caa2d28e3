#ifndef BOOJUM_PARALLEL_HPP
#define BOOJUM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

// Deterministic data-parallel helpers: work is cut into fixed-size chunks
// whose partial results are combined in chunk order (pairwise tree), so
// results are bit-identical for any thread count.

namespace boojum {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// body(chunk_index, begin, end); chunk boundaries never depend on `threads`
template <class Body>
inline void for_chunks(std::size_t n, std::size_t chunk, int threads, Body&& body) {
    if (n == 0) return;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    const int t = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), nchunks));
    if (t <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            body(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c; (c = next.fetch_add(1, std::memory_order_relaxed)) < nchunks;)
            body(c, c * chunk, std::min(n, (c + 1) * chunk));
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(t - 1);
        for (int k = 0; k < t - 1; ++k) pool.emplace_back(worker);
        worker();
    }
}

inline double pairwise_sum(std::vector<double> v) {
    std::size_t n = v.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        std::size_t h = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) v[h++] = v[i] + v[i + 1];
        if (n % 2) v[h++] = v[n - 1];
        n = h;
    }
    return v[0];
}

}  // namespace boojum

#endif
