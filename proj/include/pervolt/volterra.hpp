#pragma once

// Forward solvers for the convolution Volterra equation
//   X(n+1) = f(n+1) + sum_{j=0}^{n} U(n-j) X(j),  X(0) = X0,
// its resolvent Z (Z(0) = I, f = 0) and the two representations of Z.

#include "pervolt/matseq.hpp"

#include <cstddef>

namespace pervolt {

/// U is d x d, f is d x c (c = 1 for vector problems), X0 is d x c.
/// f(0) is stored but never read by the recursion.
struct VolterraProblem {
    MatSeq U;
    MatSeq f;
    Matrix X0;
};

/// X(0..n_max). Requires U.len >= n_max and f.len >= n_max + 1.
MatSeq solve_forced(const VolterraProblem& p, std::size_t n_max);

/// Z(0..n_max). Requires U.len >= n_max.
MatSeq solve_resolvent(const MatSeq& U, std::size_t n_max);

/// X(n) = Z(n) X0 + sum_{j=1}^{n} Z(n-j) f(j) for n < min(Z.len, f.len).
MatSeq variation_of_constants(const MatSeq& Z, const MatSeq& f, const Eigen::Ref<const Matrix>& X0);

/// Z(0) = I, Z(1) = U(0), Z(n) = U(n-1) + sum_{j=2}^{n} U^{*j}(n-j), for
/// n <= n_max. Requires n_max >= 2 and U.len >= n_max. Cost grows like
/// n_max^3; this is a cross-check, not a solver.
MatSeq neumann_representation(const MatSeq& U, std::size_t n_max);

} // namespace pervolt
