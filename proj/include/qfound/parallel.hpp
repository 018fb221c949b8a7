#pragma once

#include <cstdint>
#include <functional>

namespace qfound {

// Worker count: min(hardware, QFOUND_THREADS). Always >= 1.
int max_threads();

// Number of chunks [0, n) is split into; depends on n only, never on the
// worker count, so per-chunk results reduced in chunk order are identical for
// any thread configuration.
int chunk_count(std::int64_t n);

// Runs f(begin, end, chunk_index) over the fixed partition of [0, n).
// Workers pull chunks from a shared queue; f must only touch chunk-local
// state indexed by chunk_index.
void parallel_chunks(std::int64_t n,
                     const std::function<void(std::int64_t, std::int64_t, int)>& f);

// Runs f(i) for i in [0, n); one task per index, pulled by worker threads.
// For coarse jobs (optimizer restarts) whose outputs are indexed by i.
void parallel_tasks(int n, const std::function<void(int)>& f);

}  // namespace qfound
