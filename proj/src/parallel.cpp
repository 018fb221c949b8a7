#include "qfound/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qfound {

int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("QFOUND_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < hw) hw = static_cast<int>(cap);
    }
    return hw;
}

int chunk_count(std::int64_t n) {
    if (n <= 0) return 0;
    // Small jobs get one chunk; large ones a fixed fan-out.
    if (n < 4096) return 1;
    return static_cast<int>(std::min<std::int64_t>(64, n / 1024));
}

void parallel_chunks(std::int64_t n,
                     const std::function<void(std::int64_t, std::int64_t, int)>& f) {
    const int chunks = chunk_count(n);
    if (chunks <= 0) return;
    if (chunks == 1) {
        f(0, n, 0);
        return;
    }
    const std::int64_t base = n / chunks;
    const std::int64_t rem = n % chunks;
    auto bounds = [&](int c) {
        const std::int64_t lo = c * base + std::min<std::int64_t>(c, rem);
        const std::int64_t hi = lo + base + (c < rem ? 1 : 0);
        return std::pair<std::int64_t, std::int64_t>{lo, hi};
    };

    const int workers = std::min(max_threads(), chunks);
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) {
            auto [lo, hi] = bounds(c);
            f(lo, hi, c);
        }
        return;
    }

    std::atomic<int> next{0};
    auto drain = [&]() {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= chunks) return;
            auto [lo, hi] = bounds(c);
            f(lo, hi, c);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
}

void parallel_tasks(int n, const std::function<void(int)>& f) {
    if (n <= 0) return;
    const int workers = std::min(max_threads(), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    auto drain = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
}

}  // namespace qfound
