#pragma once

// Data-parallel inner loops used by the convolution solvers.
//
// Every kernel has a scalar reference implementation; vectorised variants
// must agree with it to 1e-13 relative to the absolute-value sum of the
// products. The active backend is chosen once at startup from the CPU
// features and can be overridden (tests run every available backend).

#include <cstddef>
#include <string_view>
#include <vector>

namespace pervolt::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

/// Backends compiled into this build and supported by the running CPU.
std::vector<Backend> available_backends();
bool backend_available(Backend b) noexcept;

Backend active_backend() noexcept;
/// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend b);

/// RAII override of the active backend.
class ScopedBackend {
public:
    explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_backend(b); }
    ~ScopedBackend() { set_backend(previous_); }
    ScopedBackend(const ScopedBackend&) = delete;
    ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
    Backend previous_;
};

/// sum_{j<n} a[j] * b[j]
double dot(const double* a, const double* b, std::size_t n) noexcept;

/// sum_{j<n} a[n-1-j] * b[j], i.e. one output term of a discrete convolution.
double rdot(const double* a, const double* b, std::size_t n) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double rdot(const double* a, const double* b, std::size_t n) noexcept;
} // namespace scalar

#if defined(PERVOLT_WITH_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double rdot(const double* a, const double* b, std::size_t n) noexcept;
} // namespace avx2
#endif

#if defined(PERVOLT_WITH_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double rdot(const double* a, const double* b, std::size_t n) noexcept;
} // namespace neon
#endif

} // namespace pervolt::simd
