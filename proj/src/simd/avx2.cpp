// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include "pervolt/simd/kernels.hpp"

#include <immintrin.h>

namespace pervolt::simd::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// (x0,x1,x2,x3) -> (x3,x2,x1,x0)
inline __m256d reverse(__m256d v) noexcept { return _mm256_permute4x64_pd(v, 0x1B); }

} // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 8), _mm256_loadu_pd(b + j + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 12), _mm256_loadu_pd(b + j + 12), acc3);
    }
    for (; j + 4 <= n; j += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    }
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; j < n; ++j) {
        s += a[j] * b[j];
    }
    return s;
}

double rdot(const double* a, const double* b, std::size_t n) noexcept {
    // a is walked backwards from a[n-1]; each 4-lane load of a ends at
    // a[n-1-j] and is lane-reversed to line up with b[j..j+3].
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        const double* t = a + (n - j);
        acc0 = _mm256_fmadd_pd(reverse(_mm256_loadu_pd(t - 4)), _mm256_loadu_pd(b + j), acc0);
        acc1 = _mm256_fmadd_pd(reverse(_mm256_loadu_pd(t - 8)), _mm256_loadu_pd(b + j + 4), acc1);
        acc2 = _mm256_fmadd_pd(reverse(_mm256_loadu_pd(t - 12)), _mm256_loadu_pd(b + j + 8), acc2);
        acc3 = _mm256_fmadd_pd(reverse(_mm256_loadu_pd(t - 16)), _mm256_loadu_pd(b + j + 12), acc3);
    }
    for (; j + 4 <= n; j += 4) {
        acc0 = _mm256_fmadd_pd(reverse(_mm256_loadu_pd(a + (n - j) - 4)), _mm256_loadu_pd(b + j), acc0);
    }
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; j < n; ++j) {
        s += a[n - 1 - j] * b[j];
    }
    return s;
}

} // namespace pervolt::simd::avx2
