#pragma once

// ARCH(infinity) memory analysis: the delta recursion, the autocovariance
// shape chi, moment conditions, and the two-periodic polynomial example
// with its closed-form limits.

#include "pervolt/lift.hpp"
#include "pervolt/matseq.hpp"
#include "pervolt/profile.hpp"
#include "pervolt/series.hpp"
#include "pervolt/weights.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace pervolt {

enum class ArchFamily { two_periodic_poly, table };

/// X(k) = (a + sum_{j>=1} b(j) X(k-j)) xi(k) with lambda1 = E xi, lambda2 = E xi^2,
/// var = E (xi - lambda1)^2.
///
/// two_periodic_poly: b(j) = a_even j^-alpha for even j, a_odd j^-alpha for odd j.
/// table:             b(j) = values[j-1] for j = 1..size; `finite` says b is
///                    zero beyond the table, otherwise sums are prefix-only.
struct ArchModel {
    double a = 0.0;
    ArchFamily family = ArchFamily::two_periodic_poly;
    double a_odd = 0.0;
    double a_even = 0.0;
    double alpha = 2.0;
    /// phi(0) for the paired weight phi(n) = n^-alpha.
    double phi0 = 2.0;
    std::vector<double> table;
    bool table_finite = false;
    double lambda1 = 1.0;
    std::optional<double> lambda2;
    std::optional<double> var;

    static ArchModel two_periodic_poly(double a_odd, double a_even, double alpha, double lambda1);
    static ArchModel from_table(std::vector<double> b, bool finite, double lambda1);

    /// Throws std::invalid_argument on negative coefficients or inconsistent moments.
    void validate() const;

    /// b(j) for j >= 1; throws std::out_of_range for j = 0 or past a non-finite table.
    double b(std::size_t j) const;
    /// phi(n) = n^-alpha, phi(0) = phi0 (rate 1).
    WeightFn phi() const;
    /// U(n) = lambda1 b(n+1), the kernel whose resolvent is delta.
    SeriesPtr kernel() const;
};

/// delta(0) = 1, delta(n) = lambda1 sum_{j<n} b(n-j) delta(j), n <= n_max.
/// Throws std::invalid_argument when lambda1 == 0.
MatSeq delta_sequence(const ArchModel& m, std::size_t n_max);

/// |c(n)| <= K w(n) for all n >= from; `finite_support` means c is zero
/// beyond its stored prefix.
struct DecayCertificate {
    bool finite_support = false;
    std::optional<WeightFn> majorant;
    double K = 0.0;
    std::size_t from = 0;
    Certification cert = Certification::certified;

    static DecayCertificate finite();
    static DecayCertificate bounded_by(WeightFn w, double K, std::size_t from, Certification cert);
};

/// Majorant for delta from its computed prefix: K = 1.25 max delta(n)/phi(n)
/// over the trailing half. Modeled, since it extrapolates.
DecayCertificate delta_certificate(const MatSeq& delta, const WeightFn& phi);

struct ChiResult {
    std::vector<double> value;
    /// Bound on the truncated tail at each lag.
    std::vector<double> error;
    Certification cert = Certification::exact;
};

/// chi_c(u) = sum_{j>=0} c(j) c(j+u) for u = 0..u_max, u_max < c.len.
ChiResult chi(const MatSeq& c, std::size_t u_max, const DecayCertificate& cert);

struct StationarityReport {
    ConditionResult con1;
    ConditionResult con2;
    ConditionResult con3;
    bool con2_evaluable = false;
    bool con3_evaluable = false;
};

/// con1: lambda1 sum b < 1; con2: lambda2^{1/2} sum b < 1;
/// con3: var sum_u chi_delta(u) chi_b*(u) < 1 (u over all integers).
/// con3 needs delta, computed to n_max when var > 0 and con1 passes.
StationarityReport stationarity_checks(const ArchModel& m, double tail_tol = 1e-10, std::size_t n_max = 4096);

struct ArchClosedForms {
    double S0 = 0.0, S1 = 0.0;
    double a0 = 0.0, a1 = 0.0;
    double Lambda = 0.0;
    double T0 = 0.0, T1 = 0.0;
    double d0 = 0.0, d1 = 0.0;
    double sum_delta_even = 0.0, sum_delta_odd = 0.0;
    double tau0 = 0.0, tau1 = 0.0;
    double ratio_even = 0.0, ratio_odd = 0.0;
    /// The example assumes a0 != a1; false flags the degenerate case.
    bool distinct_coefficients = true;
    Certification cert = Certification::exact;
};

/// Two-periodic polynomial family only. a_i = lim lambda1 b(2n+i+1)/phi(2n),
/// so a0 = lambda1 a_odd and a1 = lambda1 a_even. Throws ConditionNotMet
/// when S0 + S1 >= 1.
ArchClosedForms closed_forms(const ArchModel& m, double tail_tol = 1e-10);

struct AutocovRatio {
    ConvergenceReport even;
    ConvergenceReport odd;
    /// |even - odd| > 5 (est_error_even + est_error_odd)
    bool separated = false;
    std::vector<double> chi_delta;
};

/// chi_delta(2u)/b(2u) and chi_delta(2u+1)/b(2u+1) over u in [u_max/2, u_max],
/// each extrapolated by fit_reciprocal. Requires n_max >= 2 u_max + 2.
AutocovRatio autocov_ratio(const ArchModel& m, std::size_t u_max, std::size_t n_max);

/// b(k)/zeta^k -> infinity for each zeta in the grid. Pass analytically for
/// the polynomial family with a nonzero coefficient; for tables, pass when
/// the ratio's running minimum grows from the middle to the end of the table.
Verdict slower_than_exponential_check(const ArchModel& m, const std::vector<double>& zetas);

} // namespace pervolt
