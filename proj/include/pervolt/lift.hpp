#pragma once

// Lifting of an N-periodic problem to an asymptotically autonomous
// Nd-dimensional one: the block matrices B and J(n), the block-Toeplitz
// inverse C = (I - B)^{-1}, the lifted kernel F(n) = C J(n), and the
// stability conditions on weighted kernel sums.

#include "pervolt/matseq.hpp"
#include "pervolt/series.hpp"
#include "pervolt/weights.hpp"

#include <cstddef>
#include <string>

namespace pervolt {

/// A strict inequality value < threshold evaluated on an interval
/// [value - error, value + error]. The verdict is pass or fail only when the
/// whole interval is on one side; prefix-only sums carry no interval.
struct ConditionResult {
    std::string name;
    double value = 0.0;
    double error = 0.0;
    double threshold = 1.0;
    Verdict verdict = Verdict::inconclusive;
    Certification cert = Certification::exact;

    bool holds() const noexcept { return verdict == Verdict::pass; }
};

ConditionResult decide_below(std::string name, double value, double error, double threshold, Certification cert);

/// Block (p, q), 0-based, is U(p - q - 1) for p > q and zero otherwise.
Matrix build_B(const MatSeq& U, std::size_t N);

/// Block (p, q) is U(N n + N + p - q - 1). Requires U.len > N n + 2N - 2.
Matrix build_J(const MatSeq& U, std::size_t N, std::size_t n);

/// (I - B)^{-1} for strictly lower block-triangular block-Toeplitz B, built
/// from the first block column recursion C_{t,0} = sum_{l=1}^{t} B_{l,0}
/// C_{t-l,0} and copied down the diagonals. Throws std::invalid_argument if
/// B does not have that shape.
Matrix toeplitz_inverse(const Eigen::Ref<const Matrix>& B, std::size_t N);

struct LiftedSystem {
    std::size_t N = 1;
    std::size_t d = 1;
    Matrix B;
    Matrix C;
    /// F(0..n_max), Nd x Nd blocks.
    MatSeq F;
    /// Kernel the system was built from; used for certified tails.
    SeriesPtr source;
};

/// Requires the kernel to provide N(n_max + 2) terms.
LiftedSystem build_F(SeriesPtr U, std::size_t N, std::size_t n_max);
/// Stored-prefix kernel; tail sums on the result are prefix-only.
LiftedSystem build_F(const MatSeq& U, std::size_t N, std::size_t n_max);

/// sum_n r^{-N n} J(n) (or |J(n)|), assembled blockwise from strided sums of U.
StridedSum lifted_J_transform(const Series& U, double r, std::size_t N, bool absolute, double tol = 1e-10);

/// sum_{i<N} sum_{l>=0} r^{-N(l+1)} |U(N l + i)|, the matrix behind the
/// stability conditions.
StridedSum weighted_kernel_sum(const Series& U, double r, std::size_t N, double tol = 1e-10);

/// Max row sum of weighted_kernel_sum below 1. Requires 0 < r <= 1.
ConditionResult check_c3(const Series& U, double r, std::size_t N, double tail_tol = 1e-10);
ConditionResult check_c3(const MatSeq& U, double r, std::size_t N, double tail_tol = 1e-10);

/// Same quantity below 1/(1 + r^{-N}).
ConditionResult check_c5(const Series& U, double r, std::size_t N, double tail_tol = 1e-10);
ConditionResult check_c5(const MatSeq& U, double r, std::size_t N, double tail_tol = 1e-10);

/// || sum_i r^{-N(i+1)} |F(i)| ||_inf below 1: the stored F(i) exactly, the
/// rest bounded through |C| and the kernel's certified tail.
ConditionResult check_spec_bound(const LiftedSystem& sys, double r, double tail_tol = 1e-10);

} // namespace pervolt
