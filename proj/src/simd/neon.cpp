#include "pervolt/simd/kernels.hpp"

#include <arm_neon.h>

namespace pervolt::simd::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    float64x2_t acc2 = vdupq_n_f64(0.0);
    float64x2_t acc3 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + j), vld1q_f64(b + j));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + j + 2), vld1q_f64(b + j + 2));
        acc2 = vfmaq_f64(acc2, vld1q_f64(a + j + 4), vld1q_f64(b + j + 4));
        acc3 = vfmaq_f64(acc3, vld1q_f64(a + j + 6), vld1q_f64(b + j + 6));
    }
    for (; j + 2 <= n; j += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + j), vld1q_f64(b + j));
    }
    double s = vaddvq_f64(vaddq_f64(vaddq_f64(acc0, acc1), vaddq_f64(acc2, acc3)));
    for (; j < n; ++j) {
        s += a[j] * b[j];
    }
    return s;
}

double rdot(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const double* t = a + (n - j);
        float64x2_t x0 = vld1q_f64(t - 2);
        float64x2_t x1 = vld1q_f64(t - 4);
        acc0 = vfmaq_f64(acc0, vextq_f64(x0, x0, 1), vld1q_f64(b + j));
        acc1 = vfmaq_f64(acc1, vextq_f64(x1, x1, 1), vld1q_f64(b + j + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; j < n; ++j) {
        s += a[n - 1 - j] * b[j];
    }
    return s;
}

} // namespace pervolt::simd::neon
