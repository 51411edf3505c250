#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "expstable/rng.hpp"

namespace expstable {

// Number of replica workers: EXPSTABLE_WORKERS overrides, else the OpenMP
// default. A value of 1 forces the serial path.
inline int worker_count() {
    if (const char* env = std::getenv("EXPSTABLE_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Serial reference: replica i runs on its own stream derived from
// (base_seed, i), results land at index i. Kept as the ground truth the
// parallel kernel must reproduce bit for bit.
template <typename T, typename Fn>
std::vector<T> run_replicas_serial(long long n, std::uint64_t base_seed, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        Rng rng(stream_seed(base_seed, static_cast<std::uint64_t>(i)));
        out[static_cast<std::size_t>(i)] = fn(i, rng);
    }
    return out;
}

// OpenMP kernel. Each iteration owns its stream and output slot, so the
// result is independent of scheduling and thread count. Exceptions are
// captured and rethrown after the region.
template <typename T, typename Fn>
std::vector<T> run_replicas(long long n, std::uint64_t base_seed, Fn&& fn) {
    const int workers = worker_count();
    if (workers <= 1) return run_replicas_serial<T>(n, base_seed, fn);

    std::vector<T> out(static_cast<std::size_t>(n));
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
#endif
    for (long long i = 0; i < n; ++i) {
        try {
            Rng rng(stream_seed(base_seed, static_cast<std::uint64_t>(i)));
            out[static_cast<std::size_t>(i)] = fn(i, rng);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(expstable_replica_error)
#endif
            {
                if (!error) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace expstable
