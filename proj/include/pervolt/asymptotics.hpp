#pragma once

// Predicted weighted limits: the admissibility formula for perturbed
// equations, the periodic resolvent limits rho_i through the lifted system,
// the limits of forced solutions, the converse recovery of kernel limits
// from a resolvent, and the summability bound on the resolvent.

#include "pervolt/lift.hpp"
#include "pervolt/matseq.hpp"
#include "pervolt/profile.hpp"
#include "pervolt/series.hpp"
#include "pervolt/weights.hpp"

#include <cstddef>

namespace pervolt {

struct AdmissibilityResult {
    /// lim z(n) / gamma(n)
    Matrix limit;
    /// z~(r) = (rI - F~(r))^{-1} [r z0 + f~(r)]
    Matrix z_transform;
    /// rho(sum_i r^{-(i+1)} |F(i)|) < 1
    ConditionResult condition;
    Certification cert = Certification::exact;
};

/// The limit formula from already-evaluated transforms.
///   F_transform      sum F(i) r^{-i}
///   F_abs_bound      entrywise upper bound on sum |F(i)| r^{-i}, with its error
///   f_transform      sum f(i) r^{-i}
/// Throws ConditionNotMet when the spectral condition is not established or
/// rI - F~(r) is singular.
AdmissibilityResult admissibility_from_transforms(const Matrix& F_transform, const Matrix& F_abs_bound,
                                                  const Matrix& F_abs_error, const Matrix& f_transform,
                                                  const Matrix& z0, double r, const Matrix& L_f,
                                                  const Matrix& L_F, Certification cert);

/// z(n+1) = f(n) + sum_{i<=n} F(n-i) z(i), z(0) = z0, with L_f = lim f/gamma
/// and L_F = lim F/gamma for gamma in W(r). Columns of z0 are treated as
/// independent solutions.
AdmissibilityResult admissibility_limit(const Series& F, const Series& f, const Matrix& z0, const WeightFn& gamma,
                                        double r, const Matrix& L_f, const Matrix& L_F, double tail_tol = 1e-10);
/// Stored prefixes; the result is flagged prefix-only unless both are short
/// enough to be complete (callers decide by wrapping in TableSeries instead).
AdmissibilityResult admissibility_limit(const MatSeq& F, const MatSeq& f, const Matrix& z0, const WeightFn& gamma,
                                        double r, const Matrix& L_f, const Matrix& L_F, double tail_tol = 1e-10);

/// rho_i = lim Z(N n + i)/phi(N n) for the resolvent of U, given the kernel
/// limits A_i = lim U(N n + i)/phi(N n). Throws ConditionNotMet unless the
/// c3 condition holds.
AsymptoticProfile predict_rho(const Series& U, const WeightFn& phi, double r, std::size_t N,
                              const AsymptoticProfile& A, double tail_tol = 1e-10);
AsymptoticProfile predict_rho(const MatSeq& U, const WeightFn& phi, double r, std::size_t N,
                              const AsymptoticProfile& A, double tail_tol = 1e-10);

/// lim X(N n + i)/phi(N n) for X = Z X0 + sum Z(n-j) f(j), with f(0) taken
/// as zero. `Z` must provide strided sums (an AsymptoticSeries built from
/// the computed resolvent and `rho` is the usual choice).
AsymptoticProfile predict_X_limit(const AsymptoticProfile& rho, const Series& Z, const Series& f, const Matrix& X0,
                                  const AsymptoticProfile& L, double r, std::size_t N, double tail_tol = 1e-10);
/// Convenience: Z is a computed resolvent continued by rho.
AsymptoticProfile predict_X_limit(const AsymptoticProfile& rho, const MatSeq& Z, const Series& f, const Matrix& X0,
                                  const AsymptoticProfile& L, double r, std::size_t N, double tail_tol = 1e-10);

struct ConverseResult {
    /// Recovered A_i.
    AsymptoticProfile kernel_limits;
    /// D_i for the auxiliary resolvent R of Y(n) = -Z(n+1).
    AsymptoticProfile aux_limits;
    /// c3 applied to Y.
    ConditionResult aux_condition;
};

/// Recovers lim U(N n + i)/phi(N n) from the resolvent Z and its limits
/// rho. `c5` is the c5 verdict for the (unknown or known) kernel and must
/// hold; Z must reach well into its asymptotic regime.
ConverseResult converse_check(const MatSeq& Z, const AsymptoticProfile& rho, const WeightFn& phi, double r,
                              std::size_t N, const ConditionResult& c5, double tail_tol = 1e-10);

struct SumZBound {
    /// A_T = sum_{i<N} sum_{n<=T} r^{-N(n+1)} |Z(N n + i)|
    Matrix lhs;
    /// r^{-N} I + B A_T with B the weighted kernel sum
    Matrix rhs;
    /// max entry of lhs - rhs
    double max_violation = 0.0;
    bool holds = false;
    Certification cert = Certification::exact;
};

/// Requires Z.len > N T + N - 1.
SumZBound verify_sumZ_bound(const Series& U, const MatSeq& Z, double r, std::size_t N, std::size_t T,
                            double tail_tol = 1e-10);

} // namespace pervolt
