#pragma once

// Matrix sequences known to infinite order, at least in the sense that
// their strided weighted sums can be evaluated with a stated certification.
// Every infinite sum in the condition checks and limit formulas goes
// through Series::strided_sum.

#include "pervolt/matseq.hpp"
#include "pervolt/profile.hpp"
#include "pervolt/weights.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace pervolt {

struct StridedSum {
    Matrix value;
    /// Entrywise bound (certified) or estimate (modeled) of the error.
    Matrix error;
    Certification cert = Certification::exact;
};

class Series {
public:
    virtual ~Series() = default;

    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    /// Number of terms at() can produce; SIZE_MAX for parametric sequences.
    virtual std::size_t available() const = 0;
    /// Throws std::out_of_range when n >= available().
    virtual Matrix at(std::size_t n) const = 0;

    /// sum_{n>=0} r^{-N n} S(N n + k), entrywise |S| when `absolute`.
    virtual StridedSum strided_sum(double r, std::size_t N, std::size_t k, bool absolute,
                                   double tol = 1e-10) const = 0;

    /// The same sum restricted to n >= start.
    StridedSum strided_tail(double r, std::size_t N, std::size_t k, std::size_t start, bool absolute,
                            double tol = 1e-10) const;

    /// S(0..len-1); throws std::length_error if fewer terms are available.
    virtual MatSeq materialize(std::size_t len) const;
};

using SeriesPtr = std::shared_ptr<const Series>;

/// S(n) = pattern[(n + shift) mod P] * w(n + shift). Sums are certified
/// through the weight's tail bounds.
class ModulatedSeries final : public Series {
public:
    ModulatedSeries(std::vector<Matrix> pattern, std::size_t shift, WeightFn w);

    std::size_t rows() const override;
    std::size_t cols() const override;
    std::size_t available() const override;
    Matrix at(std::size_t n) const override;
    StridedSum strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double tol) const override;

    const std::vector<Matrix>& pattern() const noexcept { return pattern_; }
    std::size_t shift() const noexcept { return shift_; }
    const WeightFn& weight() const noexcept { return w_; }

private:
    std::vector<Matrix> pattern_;
    std::size_t shift_;
    WeightFn w_;
};

/// A stored prefix. With `finite` the sequence is zero beyond it and sums
/// are exact; otherwise sums cover the prefix only and say so.
class TableSeries final : public Series {
public:
    TableSeries(MatSeq values, bool finite);

    std::size_t rows() const override { return values_.rows(); }
    std::size_t cols() const override { return values_.cols(); }
    std::size_t available() const override;
    Matrix at(std::size_t n) const override;
    StridedSum strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double tol) const override;
    MatSeq materialize(std::size_t len) const override;

    const MatSeq& values() const noexcept { return values_; }
    bool finite() const noexcept { return finite_; }

private:
    MatSeq values_;
    bool finite_;
};

/// A computed prefix continued by its asymptotic model
/// S(N m + i) ~ limits[i] * phi(N m). Tail sums are modeled, with an error
/// estimate taken from the gap between the last stored ratio and the limit.
class AsymptoticSeries final : public Series {
public:
    AsymptoticSeries(MatSeq head, AsymptoticProfile model);

    std::size_t rows() const override { return head_.rows(); }
    std::size_t cols() const override { return head_.cols(); }
    std::size_t available() const override { return head_.len(); }
    Matrix at(std::size_t n) const override { return head_.at(n); }
    /// N must equal the model period.
    StridedSum strided_sum(double r, std::size_t N, std::size_t k, bool absolute, double tol) const override;
    MatSeq materialize(std::size_t len) const override { return head_.prefix(len); }

    const AsymptoticProfile& model() const noexcept { return model_; }

private:
    MatSeq head_;
    AsymptoticProfile model_;
};

/// lim U(N n + i)/phi(N n) for a modulated kernel whose weight belongs to
/// phi's family (same kind, rate and exponents; scale may differ). The
/// pattern period must divide N.
AsymptoticProfile derive_limits(const ModulatedSeries& U, const WeightFn& phi, std::size_t N);

} // namespace pervolt
