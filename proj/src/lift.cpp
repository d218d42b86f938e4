#include "pervolt/lift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pervolt {

namespace {

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

double max_row_sum(const Matrix& A) { return A.rows() == 0 ? 0.0 : A.rowwise().sum().maxCoeff(); }

void require_rate_at_most_one(double r) {
    if (!(r > 0.0) || r > 1.0) {
        throw std::invalid_argument("condition checks need 0 < r <= 1, got r = " + std::to_string(r));
    }
}

StridedSum lifted_sum(const Series& U, double r, std::size_t N, bool absolute, std::size_t start, double tol) {
    const std::size_t d = U.rows();
    const Eigen::Index Nd = ix(N * d);
    StridedSum out{Matrix::Zero(Nd, Nd), Matrix::Zero(Nd, Nd), Certification::exact};
    // Blocks depend only on p - q; evaluate each diagonal once.
    for (std::size_t diag = 0; diag + 1 < 2 * N; ++diag) {
        const std::size_t k = diag; // N + (p - q) - 1 with p - q = diag - N + 1
        const StridedSum s =
            start == 0 ? U.strided_sum(r, N, k, absolute, tol) : U.strided_tail(r, N, k, start, absolute, tol);
        out.cert = weakest(out.cert, s.cert);
        for (std::size_t q = 0; q < N; ++q) {
            const long p_signed = static_cast<long>(q) + static_cast<long>(diag) - static_cast<long>(N) + 1;
            if (p_signed < 0 || p_signed >= static_cast<long>(N)) {
                continue;
            }
            const std::size_t p = static_cast<std::size_t>(p_signed);
            out.value.block(ix(p * d), ix(q * d), ix(d), ix(d)) = s.value;
            out.error.block(ix(p * d), ix(q * d), ix(d), ix(d)) = s.error;
        }
    }
    return out;
}

} // namespace

ConditionResult decide_below(std::string name, double value, double error, double threshold, Certification cert) {
    ConditionResult res;
    res.name = std::move(name);
    res.value = value;
    res.error = error;
    res.threshold = threshold;
    res.cert = cert;
    if (value + error < threshold) {
        res.verdict = Verdict::pass;
    } else if (value - error >= threshold) {
        res.verdict = Verdict::fail;
    } else {
        res.verdict = Verdict::inconclusive;
    }
    return res;
}

Matrix build_B(const MatSeq& U, std::size_t N) {
    if (N == 0 || !U.is_square()) {
        throw std::invalid_argument("build_B: need N >= 1 and a square kernel");
    }
    if (N > 1 && U.len() < N - 1) {
        throw std::length_error("build_B: kernel needs " + std::to_string(N - 1) + " terms");
    }
    const std::size_t d = U.d();
    Matrix B = Matrix::Zero(ix(N * d), ix(N * d));
    for (std::size_t p = 1; p < N; ++p) {
        for (std::size_t q = 0; q < p; ++q) {
            B.block(ix(p * d), ix(q * d), ix(d), ix(d)) = U.at(p - q - 1);
        }
    }
    return B;
}

Matrix build_J(const MatSeq& U, std::size_t N, std::size_t n) {
    if (N == 0 || !U.is_square()) {
        throw std::invalid_argument("build_J: need N >= 1 and a square kernel");
    }
    if (U.len() <= N * n + 2 * N - 2) {
        throw std::length_error("build_J: kernel needs index " + std::to_string(N * n + 2 * N - 2));
    }
    const std::size_t d = U.d();
    Matrix J(ix(N * d), ix(N * d));
    for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t q = 0; q < N; ++q) {
            J.block(ix(p * d), ix(q * d), ix(d), ix(d)) = U.at(N * n + N - 1 + p - q);
        }
    }
    return J;
}

Matrix toeplitz_inverse(const Eigen::Ref<const Matrix>& B, std::size_t N) {
    if (N == 0 || B.rows() != B.cols() || B.rows() % static_cast<Eigen::Index>(N) != 0 || B.rows() == 0) {
        throw std::invalid_argument("toeplitz_inverse: B must be square with a size divisible by N");
    }
    const Eigen::Index d = B.rows() / static_cast<Eigen::Index>(N);
    auto blk = [&](std::size_t p, std::size_t q) { return B.block(ix(p) * d, ix(q) * d, d, d); };
    for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t q = 0; q < N; ++q) {
            if (p <= q) {
                if (!blk(p, q).isZero(0.0)) {
                    throw std::invalid_argument("toeplitz_inverse: B is not strictly lower block-triangular");
                }
            } else if (blk(p, q) != blk(p - q, 0)) {
                throw std::invalid_argument("toeplitz_inverse: B is not block-Toeplitz");
            }
        }
    }
    std::vector<Matrix> col(N);
    col[0] = Matrix::Identity(d, d);
    for (std::size_t t = 1; t < N; ++t) {
        col[t] = Matrix::Zero(d, d);
        for (std::size_t l = 1; l <= t; ++l) {
            col[t] += blk(l, 0) * col[t - l];
        }
    }
    Matrix C = Matrix::Zero(B.rows(), B.cols());
    for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t q = 0; q <= p; ++q) {
            C.block(ix(p) * d, ix(q) * d, d, d) = col[p - q];
        }
    }
    return C;
}

LiftedSystem build_F(SeriesPtr U, std::size_t N, std::size_t n_max) {
    if (!U) {
        throw std::invalid_argument("build_F: null kernel");
    }
    if (N == 0) {
        throw std::invalid_argument("build_F: N must be positive");
    }
    const MatSeq u = U->materialize(N * (n_max + 2));
    LiftedSystem sys;
    sys.N = N;
    sys.d = u.d();
    sys.B = build_B(u, N);
    sys.C = toeplitz_inverse(sys.B, N);
    sys.F = MatSeq(N * sys.d, N * sys.d, n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        sys.F.set(n, sys.C * build_J(u, N, n));
    }
    sys.source = std::move(U);
    return sys;
}

LiftedSystem build_F(const MatSeq& U, std::size_t N, std::size_t n_max) {
    return build_F(std::make_shared<TableSeries>(U, false), N, n_max);
}

StridedSum lifted_J_transform(const Series& U, double r, std::size_t N, bool absolute, double tol) {
    if (N == 0 || !(r > 0.0)) {
        throw std::invalid_argument("lifted_J_transform: need N >= 1 and r > 0");
    }
    return lifted_sum(U, r, N, absolute, 0, tol);
}

StridedSum weighted_kernel_sum(const Series& U, double r, std::size_t N, double tol) {
    if (N == 0 || !(r > 0.0)) {
        throw std::invalid_argument("weighted_kernel_sum: need N >= 1 and r > 0");
    }
    const double scale = std::pow(r, -static_cast<double>(N));
    const Eigen::Index d = ix(U.rows());
    StridedSum out{Matrix::Zero(d, d), Matrix::Zero(d, d), Certification::exact};
    for (std::size_t i = 0; i < N; ++i) {
        const StridedSum s = U.strided_sum(r, N, i, true, tol);
        out.value += scale * s.value;
        out.error += scale * s.error;
        out.cert = weakest(out.cert, s.cert);
    }
    return out;
}

namespace {

ConditionResult kernel_condition(const char* name, const Series& U, double r, std::size_t N, double tol,
                                 double threshold) {
    require_rate_at_most_one(r);
    if (U.rows() != U.cols()) {
        throw std::invalid_argument(std::string(name) + ": kernel must be square");
    }
    const StridedSum s = weighted_kernel_sum(U, r, N, tol);
    return decide_below(name, max_row_sum(s.value), max_row_sum(s.error), threshold, s.cert);
}

} // namespace

ConditionResult check_c3(const Series& U, double r, std::size_t N, double tail_tol) {
    return kernel_condition("c3", U, r, N, tail_tol, 1.0);
}

ConditionResult check_c3(const MatSeq& U, double r, std::size_t N, double tail_tol) {
    return check_c3(TableSeries(U, false), r, N, tail_tol);
}

ConditionResult check_c5(const Series& U, double r, std::size_t N, double tail_tol) {
    return kernel_condition("c5", U, r, N, tail_tol, 1.0 / (1.0 + std::pow(r, -static_cast<double>(N))));
}

ConditionResult check_c5(const MatSeq& U, double r, std::size_t N, double tail_tol) {
    return check_c5(TableSeries(U, false), r, N, tail_tol);
}

ConditionResult check_spec_bound(const LiftedSystem& sys, double r, double tail_tol) {
    require_rate_at_most_one(r);
    const double rN = std::pow(r, -static_cast<double>(sys.N));
    const Eigen::Index Nd = ix(sys.N * sys.d);
    Matrix head = Matrix::Zero(Nd, Nd);
    double damp = rN;
    for (std::size_t i = 0; i < sys.F.len(); ++i) {
        head += damp * sys.F.at(i).cwiseAbs();
        damp *= rN;
    }
    Certification cert = Certification::exact;
    Matrix tail = Matrix::Zero(Nd, Nd);
    Matrix tail_err = Matrix::Zero(Nd, Nd);
    if (sys.source) {
        // |F(n)| <= |C| |J(n)| entrywise
        const StridedSum t = lifted_sum(*sys.source, r, sys.N, true, sys.F.len(), tail_tol);
        const Matrix absC = sys.C.cwiseAbs();
        tail = rN * absC * t.value.cwiseMax(0.0);
        tail_err = rN * absC * t.error;
        cert = t.cert == Certification::exact ? Certification::exact : weakest(Certification::certified, t.cert);
    } else {
        cert = Certification::prefix_only;
    }
    const double lower = max_row_sum(head);
    const double upper = max_row_sum(head + tail + tail_err);
    return decide_below("spec_bound", 0.5 * (lower + upper), 0.5 * (upper - lower), 1.0, cert);
}

} // namespace pervolt
