#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ldpcdo {

/// Worker count: LDPCDO_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("LDPCDO_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n_items).
/// Chunk boundaries depend only on (n_items, chunk_size), so per-chunk
/// results can be reduced in chunk order for output independent of the
/// worker count.
inline void parallel_chunks(long n_items, long chunk_size,
                            const std::function<void(long, long, long)>& fn) {
    const long n_chunks = (n_items + chunk_size - 1) / chunk_size;
    const unsigned workers = worker_count();
    if (workers <= 1 || n_chunks <= 1) {
        for (long c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (long c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
                fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ldpcdo
