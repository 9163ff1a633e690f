#pragma once

#include <cstdint>
#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace attractorlab {

// Execution policy for the sample-parallel kernels.  Every kernel has two
// paths: an OpenMP loop over independent work items and a plain serial loop
// kept as the reference implementation.  Both paths run identical per-item
// code and merge results in item-index order, so their outputs are
// bit-for-bit equal; the test suite checks exactly that, and the benchmark
// tool times one against the other.
enum class ExecMode { serial, openmp };

// Worker cap: ATTRACTORLAB_THREADS (0 or unset = all available cores).
inline int resolve_thread_count() {
    const char* env = std::getenv("ATTRACTORLAB_THREADS");
    if (env != nullptr) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs body(i) for i in [0, n).  Work items must be independent; any merging
// into shared state happens after the loop, in index order.
template <typename Body>
void parallel_for(std::int64_t n, ExecMode mode, Body&& body) {
    if (mode == ExecMode::serial) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#if defined(_OPENMP)
    const int threads = resolve_thread_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) body(i);
#else
    for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace attractorlab
