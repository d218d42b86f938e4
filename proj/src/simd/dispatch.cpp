#include "pervolt/simd/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace pervolt::simd {

namespace {

struct Table {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*rdot)(const double*, const double*, std::size_t) noexcept;
};

constexpr Table kScalar{Backend::scalar, &scalar::dot, &scalar::rdot};
#if defined(PERVOLT_WITH_AVX2)
constexpr Table kAvx2{Backend::avx2, &avx2::dot, &avx2::rdot};
#endif
#if defined(PERVOLT_WITH_NEON)
constexpr Table kNeon{Backend::neon, &neon::dot, &neon::rdot};
#endif

bool cpu_supports(Backend b) noexcept {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if defined(PERVOLT_WITH_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Backend::neon:
#if defined(PERVOLT_WITH_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const Table* table_for(Backend b) noexcept {
    switch (b) {
    case Backend::scalar:
        return &kScalar;
    case Backend::avx2:
#if defined(PERVOLT_WITH_AVX2)
        return &kAvx2;
#else
        return nullptr;
#endif
    case Backend::neon:
#if defined(PERVOLT_WITH_NEON)
        return &kNeon;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const Table* best_table() noexcept {
    for (Backend b : {Backend::avx2, Backend::neon}) {
        if (cpu_supports(b)) {
            return table_for(b);
        }
    }
    return &kScalar;
}

std::atomic<const Table*>& current() noexcept {
    static std::atomic<const Table*> t{best_table()};
    return t;
}

} // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
    case Backend::scalar:
        return "scalar";
    case Backend::avx2:
        return "avx2";
    case Backend::neon:
        return "neon";
    }
    return "unknown";
}

bool backend_available(Backend b) noexcept { return table_for(b) != nullptr && cpu_supports(b); }

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (backend_available(b)) {
            out.push_back(b);
        }
    }
    return out;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed)->backend; }

void set_backend(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(b)));
    }
    current().store(table_for(b), std::memory_order_relaxed);
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
    return current().load(std::memory_order_relaxed)->dot(a, b, n);
}

double rdot(const double* a, const double* b, std::size_t n) noexcept {
    return current().load(std::memory_order_relaxed)->rdot(a, b, n);
}

} // namespace pervolt::simd
