#include "pervolt/simd/kernels.hpp"

namespace pervolt::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        s += a[j] * b[j];
    }
    return s;
}

double rdot(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        s += a[n - 1 - j] * b[j];
    }
    return s;
}

} // namespace pervolt::simd::scalar
