#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qmix::par {

inline bool compiled_with_openmp() noexcept {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Fills out[i] = make(i), in parallel when enabled. make must not throw.
template <class T, class F>
std::vector<T> fill_indexed(std::size_t n, F&& make, bool parallel = true) {
    std::vector<T> out(n);
#ifdef _OPENMP
    if (parallel && n > 1) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            out[static_cast<std::size_t>(i)] = make(static_cast<std::size_t>(i));
        }
        return out;
    }
#endif
    (void)parallel;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = make(i);
    }
    return out;
}

// Buffer-then-accumulate reduction: terms are computed in parallel, the sum
// runs in index order, so the result does not depend on the thread count.
template <class F>
double sum_indexed(std::size_t n, F&& term, bool parallel = true) {
    const std::vector<double> buf = fill_indexed<double>(n, term, parallel);
    double acc = 0.0;
    for (const double x : buf) {
        acc += x;
    }
    return acc;
}

}  // namespace qmix::par
