#include "pervolt/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pervolt {

namespace {

Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void require_sum_args(double r, std::size_t N) {
    if (!(r > 0.0) || N == 0) {
        throw std::invalid_argument("strided sum: need r > 0 and N >= 1");
    }
}

} // namespace

StridedSum Series::strided_tail(double r, std::size_t N, std::size_t k, std::size_t start, bool absolute,
                                double tol) const {
    StridedSum s = strided_sum(r, N, k, absolute, tol);
    const double log_r = std::log(r);
    for (std::size_t n = 0; n < start; ++n) {
        const std::size_t idx = N * n + k;
        if (idx >= available()) {
            break;
        }
        const Matrix term = absolute ? Matrix(at(idx).cwiseAbs()) : at(idx);
        s.value -= std::exp(-static_cast<double>(N * n) * log_r) * term;
    }
    return s;
}

MatSeq Series::materialize(std::size_t len) const {
    if (len > available()) {
        throw std::length_error("series provides " + std::to_string(available()) + " terms, " +
                                std::to_string(len) + " requested");
    }
    MatSeq out(rows(), cols(), len);
    for (std::size_t n = 0; n < len; ++n) {
        out.set(n, at(n));
    }
    return out;
}

ModulatedSeries::ModulatedSeries(std::vector<Matrix> pattern, std::size_t shift, WeightFn w)
    : pattern_(std::move(pattern)), shift_(shift), w_(std::move(w)) {
    if (pattern_.empty()) {
        throw std::invalid_argument("ModulatedSeries: empty pattern");
    }
    for (const Matrix& m : pattern_) {
        if (m.rows() != pattern_.front().rows() || m.cols() != pattern_.front().cols() || m.size() == 0) {
            throw std::invalid_argument("ModulatedSeries: pattern matrices must share a nonempty shape");
        }
    }
}

std::size_t ModulatedSeries::rows() const { return static_cast<std::size_t>(pattern_.front().rows()); }
std::size_t ModulatedSeries::cols() const { return static_cast<std::size_t>(pattern_.front().cols()); }

std::size_t ModulatedSeries::available() const {
    const std::size_t dom = w_.domain_size();
    if (dom == std::numeric_limits<std::size_t>::max()) {
        return dom;
    }
    return dom > shift_ ? dom - shift_ : 0;
}

Matrix ModulatedSeries::at(std::size_t n) const {
    if (n >= available()) {
        throw std::out_of_range("ModulatedSeries index " + std::to_string(n) + " outside the weight's domain");
    }
    return pattern_[(n + shift_) % pattern_.size()] * w_(n + shift_);
}

StridedSum ModulatedSeries::strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double tol) const {
    require_sum_args(r, N);
    const std::size_t P = pattern_.size();
    const std::size_t period = P / std::gcd(N, P);
    StridedSum out{zeros(rows(), cols()), zeros(rows(), cols()), Certification::exact};
    for (std::size_t t = 0; t < period; ++t) {
        // n = period*m + t, so the pattern index is fixed along m
        const std::size_t K = N * t + k + shift_;
        const TailSum s = weighted_strided_sum(w_, r, N * period, K, tol);
        const double damp = std::pow(r, -static_cast<double>(N * t));
        const Matrix pat = absolute ? Matrix(pattern_[K % P].cwiseAbs()) : pattern_[K % P];
        out.value += damp * s.value * pat;
        out.error += damp * s.error * pat.cwiseAbs();
        out.cert = weakest(out.cert, s.cert);
    }
    return out;
}

TableSeries::TableSeries(MatSeq values, bool finite) : values_(std::move(values)), finite_(finite) {
    if (values_.empty()) {
        throw std::invalid_argument("TableSeries: need at least one stored term");
    }
}

std::size_t TableSeries::available() const {
    return finite_ ? std::numeric_limits<std::size_t>::max() : values_.len();
}

Matrix TableSeries::at(std::size_t n) const {
    if (n < values_.len()) {
        return values_.at(n);
    }
    if (finite_) {
        return zeros(rows(), cols());
    }
    throw std::out_of_range("TableSeries index " + std::to_string(n) + " beyond the stored prefix");
}

StridedSum TableSeries::strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double) const {
    require_sum_args(r, N);
    StridedSum out{zeros(rows(), cols()), zeros(rows(), cols()),
                   finite_ ? Certification::exact : Certification::prefix_only};
    const double log_r = std::log(r);
    for (std::size_t n = 0; N * n + k < values_.len(); ++n) {
        const Matrix term = values_.at(N * n + k);
        out.value += std::exp(-static_cast<double>(N * n) * log_r) * (absolute ? Matrix(term.cwiseAbs()) : term);
    }
    return out;
}

MatSeq TableSeries::materialize(std::size_t len) const {
    if (len <= values_.len()) {
        return values_.prefix(len);
    }
    if (!finite_) {
        return Series::materialize(len);
    }
    MatSeq out(rows(), cols(), len);
    for (std::size_t n = 0; n < values_.len(); ++n) {
        out.set(n, values_.at(n));
    }
    return out;
}

AsymptoticSeries::AsymptoticSeries(MatSeq head, AsymptoticProfile model)
    : head_(std::move(head)), model_(std::move(model)) {
    if (!model_.weight) {
        throw std::invalid_argument("AsymptoticSeries: the model needs its weight");
    }
    if (model_.N == 0 || model_.limits.size() != model_.N) {
        throw std::invalid_argument("AsymptoticSeries: model must hold N limit matrices");
    }
    for (const Matrix& A : model_.limits) {
        if (static_cast<std::size_t>(A.rows()) != head_.rows() || static_cast<std::size_t>(A.cols()) != head_.cols()) {
            throw std::invalid_argument("AsymptoticSeries: limit shape does not match the stored terms");
        }
    }
    if (head_.len() < model_.N) {
        throw std::invalid_argument("AsymptoticSeries: stored prefix shorter than one period");
    }
}

StridedSum AsymptoticSeries::strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double tol) const {
    require_sum_args(r, N);
    if (N != model_.N) {
        throw std::invalid_argument("AsymptoticSeries: stride must equal the model period");
    }
    const WeightFn& phi = *model_.weight;
    const std::size_t q = k / N;
    const std::size_t i = k % N;
    const double log_r = std::log(r);
    const double Nd = static_cast<double>(N);

    // m ranges over N m + i < len
    const std::size_t len = head_.len();
    const std::size_t M = len > i ? (len - 1 - i) / N + 1 : 0;

    StridedSum out{zeros(rows(), cols()), zeros(rows(), cols()), weakest(model_.cert, Certification::modeled)};
    for (std::size_t m = q; m < M; ++m) {
        const Matrix term = head_.at(N * m + i);
        out.value += std::exp(-Nd * static_cast<double>(m - q) * log_r) * (absolute ? Matrix(term.cwiseAbs()) : term);
    }

    // sum_{m >= M'} r^{-N m} phi(N m), by subtracting the head from the full sum
    const std::size_t M_tail = std::max(M, q);
    const TailSum full = weighted_strided_sum(phi, r, N, 0, tol);
    double tail = full.value;
    for (std::size_t m = 0; m < M_tail; ++m) {
        tail -= std::exp(phi.log_value(N * m) - Nd * static_cast<double>(m) * log_r);
    }
    tail = std::max(tail, 0.0);
    const double lift = std::exp(Nd * static_cast<double>(q) * log_r);
    const Matrix& A = model_.limits[i];
    out.value += lift * tail * (absolute ? Matrix(A.cwiseAbs()) : A);

    Matrix gap = zeros(rows(), cols());
    if (M >= 1) {
        const std::size_t last = M - 1;
        gap = (head_.at(N * last + i) / phi(N * last) - A).cwiseAbs();
    }
    out.error = lift * (tail * gap + full.error * A.cwiseAbs());
    return out;
}

AsymptoticProfile derive_limits(const ModulatedSeries& U, const WeightFn& phi, std::size_t N) {
    if (N == 0) {
        throw std::invalid_argument("derive_limits: N must be positive");
    }
    const std::size_t P = U.pattern().size();
    if (N % P != 0) {
        throw std::invalid_argument("derive_limits: pattern period " + std::to_string(P) +
                                    " does not divide N = " + std::to_string(N));
    }
    const WeightFn& w = U.weight();
    if (!w.same_family(phi)) {
        throw std::invalid_argument("derive_limits: kernel weight and phi are not the same family; "
                                    "limits must be supplied");
    }
    if (w.kind() == WeightKind::table) {
        throw std::invalid_argument("derive_limits: table weights have no analytic limit");
    }
    AsymptoticProfile prof;
    prof.r = phi.rate();
    prof.N = N;
    prof.weight = phi;
    prof.cert = Certification::exact;
    const double ratio = w.scale() / phi.scale();
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t c = i + U.shift();
        prof.limits.push_back(U.pattern()[c % P] * ratio * std::pow(w.rate(), static_cast<double>(c)));
    }
    return prof;
}

} // namespace pervolt
