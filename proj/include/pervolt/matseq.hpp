#pragma once

// Finite truncations of matrix-valued sequences and the elementary
// operations on them: convolution, j-fold convolution, truncated
// Z-transform, the row-sum norm and the spectral radius.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace pervolt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// U(0), ..., U(len-1), each a rows x cols real matrix.
///
/// Storage is component-major: the len values of entry (p, q) are
/// contiguous, so convolutions reduce to dot products over components.
/// Indexing past len-1 is an error; nothing is implicitly zero-extended.
class MatSeq {
public:
    MatSeq() = default;
    /// Zero-filled sequence.
    MatSeq(std::size_t rows, std::size_t cols, std::size_t len);

    static MatSeq scalar(std::span<const double> values);
    static MatSeq scalar(std::initializer_list<double> values);
    static MatSeq from_matrices(const std::vector<Matrix>& terms);
    /// (I, 0, ..., 0) of length len.
    static MatSeq identity_impulse(std::size_t d, std::size_t len);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    /// Block dimension of a square sequence.
    std::size_t d() const noexcept { return rows_; }
    std::size_t len() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }
    bool is_square() const noexcept { return rows_ == cols_; }

    /// Throws std::out_of_range outside 0..len-1.
    Matrix at(std::size_t n) const;
    void set(std::size_t n, const Eigen::Ref<const Matrix>& value);

    double entry(std::size_t n, std::size_t p, std::size_t q) const;
    double& entry(std::size_t n, std::size_t p, std::size_t q);

    std::span<const double> component(std::size_t p, std::size_t q) const;
    std::span<double> component(std::size_t p, std::size_t q);

    /// First `count` terms; throws std::length_error if count > len.
    MatSeq prefix(std::size_t count) const;

    /// Largest absolute entry over all terms.
    double max_abs() const noexcept;

    friend bool operator==(const MatSeq&, const MatSeq&) = default;

private:
    std::size_t offset(std::size_t n, std::size_t p, std::size_t q) const noexcept {
        return (p * cols_ + q) * len_ + n;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t len_ = 0;
    std::vector<double> data_;
};

/// Entrywise sum and scaling; lengths must match.
MatSeq operator+(const MatSeq& a, const MatSeq& b);
MatSeq operator*(double s, const MatSeq& a);

/// W(n) = sum_{j=0}^{n} U(n-j) V(j) for n < min(U.len, V.len).
///
/// U.cols must equal V.rows (square kernels acting on square or column
/// sequences). Uses the SIMD-dispatched inner loop.
MatSeq convolve(const MatSeq& U, const MatSeq& V);

/// Same contract as convolve, computed term by term with dense matrix
/// products and no vectorised kernel. This is the reference path.
MatSeq convolve_reference(const MatSeq& U, const MatSeq& V);

/// U^{*j}: U^{*2} = U*U, U^{*j} = U^{*(j-1)} * U. Requires j >= 2.
MatSeq jfold(const MatSeq& U, int j);

struct ZTransform {
    Matrix value;
    /// |U(len-1)| z^{-(len-1)} in the row-sum norm; a crude truncation indicator.
    double last_term = 0.0;
};

/// Truncated transform sum_{j<len} U(j) z^{-j} for real z != 0.
ZTransform ztransform(const MatSeq& U, double z);

/// max_i sum_j |A_ij|
double inf_norm(const Eigen::Ref<const Matrix>& A);

struct SpectralRadiusTrace {
    double estimate = 0.0;
    /// ||A^{2^k}||^{1/2^k} for k = 0, 1, ...; every entry bounds rho(A) from above.
    std::vector<double> bounds;
};

/// Spectral radius by repeated squaring with the Gelfand bound
/// ||A^{2^k}||_inf^{1/2^k}. Stops when the last step is below tol/4 and the
/// remaining gap, estimated from the whole trace, is below tol/2; throws
/// NonConvergence after 60 squarings.
SpectralRadiusTrace spectral_radius_trace(const Eigen::Ref<const Matrix>& A, double tol = 1e-8);
double spectral_radius(const Eigen::Ref<const Matrix>& A, double tol = 1e-8);

} // namespace pervolt
