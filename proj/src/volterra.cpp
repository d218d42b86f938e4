#include "pervolt/volterra.hpp"

#include "pervolt/simd/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pervolt {

namespace {

// X(n+1) = f(n+1) + sum_j U(n-j) X(j), for a sequence X of d x c blocks
// whose first term is already set. `f` may be null (resolvent).
void forward_recursion(const MatSeq& U, const MatSeq* f, MatSeq& X) {
    const std::size_t d = U.rows();
    const std::size_t c = X.cols();
    const std::size_t len = X.len();
    for (std::size_t n = 0; n + 1 < len; ++n) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < c; ++q) {
                double acc = f ? f->entry(n + 1, p, q) : 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    acc += simd::rdot(U.component(p, k).data(), X.component(k, q).data(), n + 1);
                }
                X.entry(n + 1, p, q) = acc;
            }
        }
    }
}

} // namespace

MatSeq solve_forced(const VolterraProblem& p, std::size_t n_max) {
    const std::size_t d = p.U.rows();
    if (!p.U.is_square()) {
        throw std::invalid_argument("solve_forced: kernel must be square");
    }
    if (static_cast<std::size_t>(p.X0.rows()) != d || p.f.rows() != d ||
        static_cast<std::size_t>(p.X0.cols()) != p.f.cols()) {
        throw std::invalid_argument("solve_forced: kernel, forcing and initial value shapes disagree");
    }
    if (p.U.len() < n_max) {
        throw std::length_error("solve_forced: kernel needs " + std::to_string(n_max) + " terms, has " +
                                std::to_string(p.U.len()));
    }
    if (p.f.len() < n_max + 1) {
        throw std::length_error("solve_forced: forcing needs " + std::to_string(n_max + 1) + " terms, has " +
                                std::to_string(p.f.len()));
    }
    MatSeq X(d, p.f.cols(), n_max + 1);
    X.set(0, p.X0);
    forward_recursion(p.U, &p.f, X);
    return X;
}

MatSeq solve_resolvent(const MatSeq& U, std::size_t n_max) {
    if (!U.is_square()) {
        throw std::invalid_argument("solve_resolvent: kernel must be square");
    }
    if (U.len() < n_max) {
        throw std::length_error("solve_resolvent: kernel needs " + std::to_string(n_max) + " terms, has " +
                                std::to_string(U.len()));
    }
    MatSeq Z = MatSeq::identity_impulse(U.d(), n_max + 1);
    forward_recursion(U, nullptr, Z);
    return Z;
}

MatSeq variation_of_constants(const MatSeq& Z, const MatSeq& f, const Eigen::Ref<const Matrix>& X0) {
    if (!Z.is_square() || f.rows() != Z.rows() || static_cast<std::size_t>(X0.rows()) != Z.rows() ||
        static_cast<std::size_t>(X0.cols()) != f.cols()) {
        throw std::invalid_argument("variation_of_constants: shape mismatch");
    }
    if (Z.empty() || f.empty()) {
        throw std::length_error("variation_of_constants: empty input");
    }
    const std::size_t d = Z.rows();
    const std::size_t c = f.cols();
    const std::size_t len = std::min(Z.len(), f.len());
    MatSeq X(d, c, len);
    for (std::size_t n = 0; n < len; ++n) {
        const Matrix head = Z.at(n) * X0;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < c; ++q) {
                double acc = head(p, q);
                if (n > 0) {
                    // sum_{i=0}^{n-1} Z(n-1-i) f(i+1)
                    for (std::size_t k = 0; k < d; ++k) {
                        acc += simd::rdot(Z.component(p, k).data(), f.component(k, q).data() + 1, n);
                    }
                }
                X.entry(n, p, q) = acc;
            }
        }
    }
    return X;
}

MatSeq neumann_representation(const MatSeq& U, std::size_t n_max) {
    if (n_max < 2) {
        throw std::invalid_argument("neumann_representation: n_max must be at least 2");
    }
    if (!U.is_square()) {
        throw std::invalid_argument("neumann_representation: kernel must be square");
    }
    if (U.len() < n_max) {
        throw std::length_error("neumann_representation: kernel needs " + std::to_string(n_max) + " terms");
    }
    const MatSeq V = U.prefix(n_max);
    MatSeq Z = MatSeq::identity_impulse(U.d(), n_max + 1);
    for (std::size_t n = 1; n <= n_max; ++n) {
        Z.set(n, V.at(n - 1));
    }
    MatSeq power = V;
    for (std::size_t j = 2; j <= n_max; ++j) {
        power = convolve_reference(power, V);
        for (std::size_t n = j; n <= n_max; ++n) {
            Z.set(n, Z.at(n) + power.at(n - j));
        }
    }
    return Z;
}

} // namespace pervolt
