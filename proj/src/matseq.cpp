#include "pervolt/matseq.hpp"

#include "pervolt/errors.hpp"
#include "pervolt/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pervolt {

MatSeq::MatSeq(std::size_t rows, std::size_t cols, std::size_t len)
    : rows_(rows), cols_(cols), len_(len), data_(rows * cols * len, 0.0) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("MatSeq: block dimensions must be positive");
    }
}

MatSeq MatSeq::scalar(std::span<const double> values) {
    MatSeq s(1, 1, values.size());
    std::copy(values.begin(), values.end(), s.data_.begin());
    return s;
}

MatSeq MatSeq::scalar(std::initializer_list<double> values) {
    return scalar(std::span<const double>(values.begin(), values.size()));
}

MatSeq MatSeq::from_matrices(const std::vector<Matrix>& terms) {
    if (terms.empty()) {
        throw std::invalid_argument("MatSeq: need at least one term");
    }
    MatSeq s(static_cast<std::size_t>(terms.front().rows()), static_cast<std::size_t>(terms.front().cols()),
             terms.size());
    for (std::size_t n = 0; n < terms.size(); ++n) {
        s.set(n, terms[n]);
    }
    return s;
}

MatSeq MatSeq::identity_impulse(std::size_t d, std::size_t len) {
    MatSeq s(d, d, len);
    if (len > 0) {
        for (std::size_t p = 0; p < d; ++p) {
            s.entry(0, p, p) = 1.0;
        }
    }
    return s;
}

Matrix MatSeq::at(std::size_t n) const {
    if (n >= len_) {
        throw std::out_of_range("MatSeq index " + std::to_string(n) + " outside 0.." +
                                std::to_string(len_ == 0 ? 0 : len_ - 1));
    }
    Matrix m(rows_, cols_);
    for (std::size_t p = 0; p < rows_; ++p) {
        for (std::size_t q = 0; q < cols_; ++q) {
            m(p, q) = data_[offset(n, p, q)];
        }
    }
    return m;
}

void MatSeq::set(std::size_t n, const Eigen::Ref<const Matrix>& value) {
    if (n >= len_) {
        throw std::out_of_range("MatSeq index " + std::to_string(n) + " out of range");
    }
    if (static_cast<std::size_t>(value.rows()) != rows_ || static_cast<std::size_t>(value.cols()) != cols_) {
        throw std::invalid_argument("MatSeq::set: block shape mismatch");
    }
    for (std::size_t p = 0; p < rows_; ++p) {
        for (std::size_t q = 0; q < cols_; ++q) {
            data_[offset(n, p, q)] = value(p, q);
        }
    }
}

double MatSeq::entry(std::size_t n, std::size_t p, std::size_t q) const {
    if (n >= len_ || p >= rows_ || q >= cols_) {
        throw std::out_of_range("MatSeq::entry out of range");
    }
    return data_[offset(n, p, q)];
}

double& MatSeq::entry(std::size_t n, std::size_t p, std::size_t q) {
    if (n >= len_ || p >= rows_ || q >= cols_) {
        throw std::out_of_range("MatSeq::entry out of range");
    }
    return data_[offset(n, p, q)];
}

std::span<const double> MatSeq::component(std::size_t p, std::size_t q) const {
    if (p >= rows_ || q >= cols_) {
        throw std::out_of_range("MatSeq::component out of range");
    }
    return {data_.data() + offset(0, p, q), len_};
}

std::span<double> MatSeq::component(std::size_t p, std::size_t q) {
    if (p >= rows_ || q >= cols_) {
        throw std::out_of_range("MatSeq::component out of range");
    }
    return {data_.data() + offset(0, p, q), len_};
}

MatSeq MatSeq::prefix(std::size_t count) const {
    if (count > len_) {
        throw std::length_error("MatSeq::prefix longer than the sequence");
    }
    MatSeq out(rows_, cols_, count);
    for (std::size_t p = 0; p < rows_; ++p) {
        for (std::size_t q = 0; q < cols_; ++q) {
            auto src = component(p, q);
            std::copy_n(src.begin(), count, out.component(p, q).begin());
        }
    }
    return out;
}

double MatSeq::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

MatSeq operator+(const MatSeq& a, const MatSeq& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.len() != b.len()) {
        throw std::invalid_argument("MatSeq addition: shape or length mismatch");
    }
    MatSeq out = a;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = 0; q < a.cols(); ++q) {
            auto dst = out.component(p, q);
            auto src = b.component(p, q);
            for (std::size_t n = 0; n < a.len(); ++n) {
                dst[n] += src[n];
            }
        }
    }
    return out;
}

MatSeq operator*(double s, const MatSeq& a) {
    MatSeq out = a;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = 0; q < a.cols(); ++q) {
            for (double& v : out.component(p, q)) {
                v *= s;
            }
        }
    }
    return out;
}

namespace {

void check_convolvable(const MatSeq& U, const MatSeq& V) {
    if (U.empty() || V.empty()) {
        throw std::invalid_argument("convolve: sequences must have at least one term");
    }
    if (U.cols() != V.rows()) {
        throw std::invalid_argument("convolve: dimension mismatch (" + std::to_string(U.cols()) + " vs " +
                                    std::to_string(V.rows()) + ")");
    }
}

} // namespace

MatSeq convolve(const MatSeq& U, const MatSeq& V) {
    check_convolvable(U, V);
    const std::size_t len = std::min(U.len(), V.len());
    MatSeq W(U.rows(), V.cols(), len);
    for (std::size_t p = 0; p < U.rows(); ++p) {
        for (std::size_t q = 0; q < V.cols(); ++q) {
            auto out = W.component(p, q);
            for (std::size_t k = 0; k < U.cols(); ++k) {
                const double* u = U.component(p, k).data();
                const double* v = V.component(k, q).data();
                for (std::size_t n = 0; n < len; ++n) {
                    out[n] += simd::rdot(u, v, n + 1);
                }
            }
        }
    }
    return W;
}

MatSeq convolve_reference(const MatSeq& U, const MatSeq& V) {
    check_convolvable(U, V);
    const std::size_t len = std::min(U.len(), V.len());
    MatSeq W(U.rows(), V.cols(), len);
    for (std::size_t n = 0; n < len; ++n) {
        Matrix acc = Matrix::Zero(U.rows(), V.cols());
        for (std::size_t j = 0; j <= n; ++j) {
            acc += U.at(n - j) * V.at(j);
        }
        W.set(n, acc);
    }
    return W;
}

MatSeq jfold(const MatSeq& U, int j) {
    if (j < 2) {
        throw std::invalid_argument("jfold: j must be at least 2");
    }
    MatSeq acc = convolve(U, U);
    for (int k = 3; k <= j; ++k) {
        acc = convolve(acc, U);
    }
    return acc;
}

ZTransform ztransform(const MatSeq& U, double z) {
    if (z == 0.0) {
        throw std::domain_error("ztransform: z must be nonzero");
    }
    if (U.empty()) {
        throw std::invalid_argument("ztransform: empty sequence");
    }
    ZTransform out;
    out.value = Matrix::Zero(U.rows(), U.cols());
    const double zinv = 1.0 / z;
    double w = 1.0;
    for (std::size_t j = 0; j < U.len(); ++j) {
        out.value += w * U.at(j);
        if (j + 1 == U.len()) {
            out.last_term = std::abs(w) * inf_norm(U.at(j));
        }
        w *= zinv;
    }
    return out;
}

double inf_norm(const Eigen::Ref<const Matrix>& A) {
    if (A.size() == 0) {
        return 0.0;
    }
    return A.cwiseAbs().rowwise().sum().maxCoeff();
}

SpectralRadiusTrace spectral_radius_trace(const Eigen::Ref<const Matrix>& A, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("spectral_radius: tol must be positive");
    }
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("spectral_radius: matrix must be square");
    }
    constexpr int kMaxSquarings = 60;

    // A^{2^k} = exp(log_scale) * M with ||M||_inf = 1.
    SpectralRadiusTrace trace;
    const double s0 = inf_norm(A);
    trace.bounds.push_back(s0);
    if (s0 == 0.0) {
        trace.estimate = 0.0;
        return trace;
    }
    Matrix M = A / s0;
    double log_scale = std::log(s0);
    double power = 1.0;
    for (int k = 1; k <= kMaxSquarings; ++k) {
        Matrix sq = M * M;
        const double s = inf_norm(sq);
        if (s == 0.0) {
            trace.bounds.push_back(0.0);
            trace.estimate = 0.0;
            return trace;
        }
        M = sq / s;
        log_scale = 2.0 * log_scale + std::log(s);
        power *= 2.0;
        const double bound = std::exp(log_scale / power);
        const double previous = trace.bounds.back();
        trace.bounds.push_back(bound);
        // ||A^n|| ~ c_n rho^n with c_n bounded but, for complex eigenvalues,
        // oscillating, so a short step alone says little. log c_j is read off
        // the trace as 2^j log(b_j / b_k); the error left is about b_k log c / 2^k.
        double log_c = 0.0;
        double pj = 1.0;
        for (std::size_t j = 0; j + 1 < trace.bounds.size(); ++j, pj *= 2.0) {
            log_c = std::max(log_c, pj * std::log(trace.bounds[j] / bound));
        }
        if (std::abs(bound - previous) < 0.25 * tol && bound * log_c / power < 0.5 * tol) {
            trace.estimate = bound;
            return trace;
        }
    }
    throw NonConvergence("spectral_radius: no convergence after 60 squarings");
}

double spectral_radius(const Eigen::Ref<const Matrix>& A, double tol) {
    return spectral_radius_trace(A, tol).estimate;
}

} // namespace pervolt
