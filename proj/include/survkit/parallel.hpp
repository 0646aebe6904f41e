#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace survkit {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Data-parallel index loop.  Every kernel built on this writes replicate i's
// result into slot i and reduces afterwards in index order, so the threaded
// and serial paths produce identical bytes.
template <class F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

template <class F>
void serial_for(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace survkit
