#pragma once

// Positive weight sequences with a geometric rate and a subexponential
// correction, numerical diagnostics for the weight class W(r), and the
// certified weighted tail sums every condition check is built on.

#include <cstddef>
#include <string_view>
#include <vector>

namespace pervolt {

enum class WeightKind { poly, poly_stretch, log_exp, table };

std::string_view to_string(WeightKind k) noexcept;

/// How much an infinite sum can be trusted.
///   exact       - finitely supported, summed completely
///   certified   - closed-form or integral bound on the truncated tail
///   modeled     - tail taken from a fitted asymptotic model (not a bound)
///   prefix_only - no tail information; the stored prefix was summed
enum class Certification { exact, certified, modeled, prefix_only };

std::string_view to_string(Certification c) noexcept;

/// The weaker of two certifications.
Certification weakest(Certification a, Certification b) noexcept;

/// A positive sequence gamma(n).
///
///   poly          r^n n^-alpha                      (gamma(0) declared)
///   poly_stretch  r^n n^-alpha exp(-n^beta)         (gamma(0) declared)
///   log_exp       r^n exp(-n / log n)               (gamma(0), gamma(1) declared)
///   table         explicit positive values
///
/// Every kind carries a positive scale factor and a stride s, so that the
/// value at n is scale * base(s * n); subsample() uses the stride.
class WeightFn {
public:
    static WeightFn poly(double r, double alpha, double value_at_0);
    static WeightFn poly_stretch(double r, double alpha, double beta, double value_at_0);
    static WeightFn log_exp(double r, double value_at_0, double value_at_1);
    static WeightFn table(std::vector<double> values);

    WeightKind kind() const noexcept { return kind_; }
    /// Geometric rate of this sequence (r^stride for a subsampled weight).
    double rate() const noexcept;
    double base_rate() const noexcept { return r_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double scale() const noexcept { return scale_; }
    std::size_t stride() const noexcept { return stride_; }
    const std::vector<double>& values() const noexcept { return table_; }

    /// Number of valid indices for a table (SIZE_MAX for parametric kinds).
    std::size_t domain_size() const noexcept;

    /// Throws std::out_of_range outside the domain.
    double operator()(std::size_t n) const;
    /// log gamma(n); avoids overflow of r^n for long horizons.
    double log_value(std::size_t n) const;

    /// Same sequence multiplied by kappa > 0.
    WeightFn scaled(double kappa) const;
    /// n -> gamma(N n).
    WeightFn subsample(std::size_t N) const;

    /// True when both describe the same parametric family up to scale and
    /// declared initial values (used to derive limits analytically).
    bool same_family(const WeightFn& other) const noexcept;

    /// Base sequence value at the unstrided index m, without the scale.
    double base_log_value(std::size_t m) const;

private:
    WeightFn() = default;

    WeightKind kind_ = WeightKind::poly;
    double r_ = 1.0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double v0_ = 1.0;
    double v1_ = 1.0;
    double scale_ = 1.0;
    std::size_t stride_ = 1;
    std::vector<double> table_;
};

double eval_weight(const WeightFn& w, std::size_t n);

/// Sum plus a bound on the absolute error of the truncated tail.
struct TailSum {
    double value = 0.0;
    double error = 0.0;
    Certification cert = Certification::certified;
};

/// sum_{n>=0} r^{-N n} w(N n + k), with the tail beyond the summed prefix
/// bounded to within tol relative to the sum.
///
/// Throws std::domain_error when the sum diverges (rate of w above r, or a
/// power law with alpha <= 1 at matching rate). Table weights sum their
/// stored values and are flagged prefix_only.
TailSum weighted_strided_sum(const WeightFn& w, double r, std::size_t N, std::size_t k, double tol = 1e-10);

/// sum_{n>=0} (n + c)^{-alpha} for c > 0, alpha > 1, by direct summation
/// followed by an Euler-Maclaurin tail whose remainder is bounded by the
/// first omitted correction.
TailSum hurwitz_sum(double alpha, double c);

enum class Verdict { pass, fail, inconclusive };
std::string_view to_string(Verdict v) noexcept;

enum class TailTrend { growing, converging, undetermined };
std::string_view to_string(TailTrend t) noexcept;

struct WMembershipReport {
    /// gamma(H-1)/gamma(H) at the horizon H.
    double ratio_limit_estimate = 0.0;
    double ratio_target = 0.0;
    /// |ratio/target - 1| at H/4, H/2, H.
    std::vector<double> ratio_residuals;
    /// sum_{i<=H} gamma(i) r^{-i}
    double transform_partial = 0.0;
    /// Partial-sum increments over the last three doublings, oldest first.
    std::vector<double> transform_increments;
    TailTrend transform_tail_flag = TailTrend::undetermined;
    /// Index m-1 holds sup_{H/2<=n<=H} (1/gamma(n)) sum_{i=m}^{n-m} gamma(n-i) gamma(i).
    std::vector<double> p1_profile;
    Verdict verdict = Verdict::inconclusive;
};

/// Numerical evidence for gamma in W(r). Requires horizon >= 4 m_max and
/// r > 0; table weights must cover the horizon.
WMembershipReport check_W_membership(const WeightFn& w, double r, std::size_t horizon = 2048,
                                     std::size_t m_max = 64);

struct SubsampledWeight {
    WeightFn weight;
    double tau = 1.0;
};

/// Phi(n) = phi(N n) with tau = r^N.
SubsampledWeight subsample_weight(const WeightFn& phi, std::size_t N);

} // namespace pervolt
