#pragma once

// Periodic asymptotic profiles: the N limit matrices of a sequence in
// WP(r, N) together with the weight they refer to, and the empirical
// machinery that estimates such limits from a computed prefix.

#include "pervolt/matseq.hpp"
#include "pervolt/weights.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace pervolt {

/// limits[i] = lim_{n} S(N n + i) / phi(N n), i = 0..N-1.
struct AsymptoticProfile {
    double r = 1.0;
    std::size_t N = 1;
    std::vector<Matrix> limits;
    std::optional<WeightFn> weight;
    Certification cert = Certification::exact;

    std::size_t rows() const { return limits.empty() ? 0 : static_cast<std::size_t>(limits.front().rows()); }
    std::size_t cols() const { return limits.empty() ? 0 : static_cast<std::size_t>(limits.front().cols()); }

    /// All-zero profile.
    static AsymptoticProfile zero(std::size_t rows, std::size_t cols, std::size_t N, double r);
};

enum class ResidualTrend { decreasing, flat, increasing };
std::string_view to_string(ResidualTrend t) noexcept;

struct ConvergenceReport {
    std::size_t index = 0;
    std::vector<std::size_t> sample_n;
    std::vector<Matrix> samples;
    /// Least-squares fit of c + e/n over the window; this is c.
    Matrix extrapolated;
    /// |e| / n_end, maximised over entries.
    double est_error = 0.0;
    ResidualTrend residual_trend = ResidualTrend::flat;
};

/// Least-squares fit of samples(n) = c + e/n; fills extrapolated, est_error
/// and residual_trend from sample_n and samples (at least two of each).
void fit_reciprocal(ConvergenceReport& rep);

/// Fits S(N n + i) / phi(N n) = c + e/n over the trailing `window` values of
/// n. Requires S.len > N * window + i and window >= 2.
ConvergenceReport estimate_limit_empirical(const MatSeq& S, const WeightFn& phi, std::size_t N, std::size_t i,
                                           std::size_t window);

struct WPMembershipReport {
    AsymptoticProfile profile;
    std::vector<ConvergenceReport> reports;
    Verdict verdict = Verdict::inconclusive;
};

/// Estimates A_i = lim U(N n + i)/phi(N n) for every i from the trailing half
/// of n <= horizon. Requires horizon * N + N - 1 < U.len.
WPMembershipReport check_WP_membership(const MatSeq& U, const WeightFn& phi, std::size_t N, std::size_t horizon);

} // namespace pervolt
