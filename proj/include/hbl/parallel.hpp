#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hbl::par {

inline int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) noexcept {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Path loops write to path-indexed slots, so the parallel and serial
// variants produce identical bits; reductions happen afterwards in index
// order. The serial variant is the reference the tests compare against.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

template <class F>
void serial_for(std::int64_t n, F&& body) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

} // namespace hbl::par
