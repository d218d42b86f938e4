#include "pervolt/weights.hpp"

#include "pervolt/errors.hpp"
#include "pervolt/simd/kernels.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pervolt {

std::string_view to_string(WeightKind k) noexcept {
    switch (k) {
    case WeightKind::poly:
        return "poly";
    case WeightKind::poly_stretch:
        return "poly_stretch";
    case WeightKind::log_exp:
        return "log_exp";
    case WeightKind::table:
        return "table";
    }
    return "unknown";
}

std::string_view to_string(Certification c) noexcept {
    switch (c) {
    case Certification::exact:
        return "exact";
    case Certification::certified:
        return "certified";
    case Certification::modeled:
        return "modeled";
    case Certification::prefix_only:
        return "prefix-only";
    }
    return "unknown";
}

Certification weakest(Certification a, Certification b) noexcept {
    return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

std::string_view to_string(TailTrend t) noexcept {
    switch (t) {
    case TailTrend::growing:
        return "growing";
    case TailTrend::converging:
        return "converging";
    case TailTrend::undetermined:
        return "undetermined";
    }
    return "unknown";
}

namespace {

void require_positive_rate(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("weight rate r must be positive and finite");
    }
}

void require_positive_value(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

} // namespace

WeightFn WeightFn::poly(double r, double alpha, double value_at_0) {
    require_positive_rate(r);
    require_positive_value(value_at_0, "value_at_0");
    WeightFn w;
    w.kind_ = WeightKind::poly;
    w.r_ = r;
    w.alpha_ = alpha;
    w.v0_ = value_at_0;
    return w;
}

WeightFn WeightFn::poly_stretch(double r, double alpha, double beta, double value_at_0) {
    require_positive_rate(r);
    require_positive_value(value_at_0, "value_at_0");
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("poly_stretch: beta must lie in (0, 1)");
    }
    WeightFn w;
    w.kind_ = WeightKind::poly_stretch;
    w.r_ = r;
    w.alpha_ = alpha;
    w.beta_ = beta;
    w.v0_ = value_at_0;
    return w;
}

WeightFn WeightFn::log_exp(double r, double value_at_0, double value_at_1) {
    require_positive_rate(r);
    require_positive_value(value_at_0, "value_at_0");
    require_positive_value(value_at_1, "value_at_1");
    WeightFn w;
    w.kind_ = WeightKind::log_exp;
    w.r_ = r;
    w.v0_ = value_at_0;
    w.v1_ = value_at_1;
    return w;
}

WeightFn WeightFn::table(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("table weight needs at least one value");
    }
    for (double v : values) {
        require_positive_value(v, "table weight entry");
    }
    WeightFn w;
    w.kind_ = WeightKind::table;
    w.table_ = std::move(values);
    return w;
}

double WeightFn::rate() const noexcept { return std::pow(r_, static_cast<double>(stride_)); }

std::size_t WeightFn::domain_size() const noexcept {
    if (kind_ != WeightKind::table) {
        return std::numeric_limits<std::size_t>::max();
    }
    return (table_.size() + stride_ - 1) / stride_;
}

double WeightFn::base_log_value(std::size_t m) const {
    const double x = static_cast<double>(m);
    switch (kind_) {
    case WeightKind::poly:
        return m == 0 ? std::log(v0_) : x * std::log(r_) - alpha_ * std::log(x);
    case WeightKind::poly_stretch:
        return m == 0 ? std::log(v0_) : x * std::log(r_) - alpha_ * std::log(x) - std::pow(x, beta_);
    case WeightKind::log_exp:
        if (m == 0) {
            return std::log(v0_);
        }
        if (m == 1) {
            return std::log(v1_);
        }
        return x * std::log(r_) - x / std::log(x);
    case WeightKind::table:
        if (m >= table_.size()) {
            throw std::out_of_range("table weight index " + std::to_string(m) + " outside domain of size " +
                                    std::to_string(table_.size()));
        }
        return std::log(table_[m]);
    }
    return 0.0;
}

double WeightFn::log_value(std::size_t n) const { return std::log(scale_) + base_log_value(stride_ * n); }

double WeightFn::operator()(std::size_t n) const {
    if (kind_ == WeightKind::table) {
        const std::size_t m = stride_ * n;
        if (m >= table_.size()) {
            throw std::out_of_range("table weight index " + std::to_string(n) + " outside domain");
        }
        return scale_ * table_[m];
    }
    return std::exp(log_value(n));
}

WeightFn WeightFn::scaled(double kappa) const {
    require_positive_value(kappa, "weight scale factor");
    WeightFn w = *this;
    w.scale_ *= kappa;
    return w;
}

WeightFn WeightFn::subsample(std::size_t N) const {
    if (N == 0) {
        throw std::invalid_argument("subsample: N must be positive");
    }
    WeightFn w = *this;
    w.stride_ *= N;
    return w;
}

bool WeightFn::same_family(const WeightFn& other) const noexcept {
    if (kind_ != other.kind_ || stride_ != other.stride_) {
        return false;
    }
    switch (kind_) {
    case WeightKind::poly:
        return r_ == other.r_ && alpha_ == other.alpha_;
    case WeightKind::poly_stretch:
        return r_ == other.r_ && alpha_ == other.alpha_ && beta_ == other.beta_;
    case WeightKind::log_exp:
        return r_ == other.r_;
    case WeightKind::table:
        return table_ == other.table_;
    }
    return false;
}

double eval_weight(const WeightFn& w, std::size_t n) { return w(n); }

TailSum hurwitz_sum(double alpha, double c) {
    if (!(alpha > 1.0)) {
        throw std::domain_error("power-law sum diverges for alpha <= 1");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("hurwitz_sum: offset must be positive");
    }
    // B_{2j} / (2j)! for j = 1..7
    constexpr std::array<double, 7> kBernoulliOverFactorial = {
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
    };
    constexpr double kStart = 40.0;
    TailSum out;
    double head = 0.0;
    std::size_t n = 0;
    for (; static_cast<double>(n) + c < kStart; ++n) {
        head += std::pow(static_cast<double>(n) + c, -alpha);
    }
    const double x0 = static_cast<double>(n) + c;
    double tail = std::pow(x0, 1.0 - alpha) / (alpha - 1.0) + 0.5 * std::pow(x0, -alpha);
    // alpha (alpha+1) ... (alpha+m-1), tracked for m = 2j - 1
    double rising = alpha;
    double remainder = 0.0;
    for (std::size_t j = 1; j <= kBernoulliOverFactorial.size(); ++j) {
        const double m = 2.0 * static_cast<double>(j) - 1.0;
        const double term = kBernoulliOverFactorial[j - 1] * rising * std::pow(x0, -alpha - m);
        if (j == kBernoulliOverFactorial.size()) {
            remainder = std::abs(term);
        } else {
            tail += term;
        }
        rising *= (alpha + m) * (alpha + m + 1.0);
    }
    out.value = head + tail;
    out.error = remainder + 4.0 * std::numeric_limits<double>::epsilon() * out.value;
    out.cert = Certification::certified;
    return out;
}

namespace {

// Unstrided base index from which the continuous extension of the summand
// is decreasing. `log_ratio` is log(rate of w per unit index / r^{1/s}).
double monotone_from(const WeightFn& w, double log_ratio_per_index) {
    switch (w.kind()) {
    case WeightKind::poly:
        if (w.alpha() >= 0.0) {
            return 1.0;
        }
        // slope log_ratio - alpha/m < 0 once m > alpha / log_ratio
        return w.alpha() / log_ratio_per_index + 1.0;
    case WeightKind::poly_stretch:
        if (w.alpha() >= 0.0) {
            return 1.0;
        }
        return std::pow(-w.alpha() / w.beta(), 1.0 / w.beta()) + 1.0;
    case WeightKind::log_exp:
        return 3.0;
    case WeightKind::table:
        break;
    }
    return 0.0;
}

// log of the continuous extension of the base sequence at real m >= 1.
double base_log_continuous(const WeightFn& w, double m) {
    const double lr = std::log(w.base_rate());
    switch (w.kind()) {
    case WeightKind::poly:
        return m * lr - w.alpha() * std::log(m);
    case WeightKind::poly_stretch:
        return m * lr - w.alpha() * std::log(m) - std::pow(m, w.beta());
    case WeightKind::log_exp:
        return m * lr - m / std::log(m);
    case WeightKind::table:
        break;
    }
    return 0.0;
}

constexpr std::size_t kMaxDirectTerms = 50'000'000;

} // namespace

TailSum weighted_strided_sum(const WeightFn& w, double r, std::size_t N, std::size_t k, double tol) {
    require_positive_rate(r);
    if (N == 0) {
        throw std::invalid_argument("weighted_strided_sum: N must be positive");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("weighted_strided_sum: tol must be positive");
    }
    const double s = static_cast<double>(w.stride());
    const double log_r = std::log(r);
    const double log_scale = std::log(w.scale());
    const double Nd = static_cast<double>(N);
    const double kd = static_cast<double>(k);

    if (w.kind() == WeightKind::table) {
        TailSum out;
        out.cert = Certification::prefix_only;
        for (std::size_t n = 0; N * n + k < w.domain_size(); ++n) {
            out.value += std::exp(w.log_value(N * n + k) - Nd * static_cast<double>(n) * log_r);
        }
        return out;
    }

    // Growth of the summand per unit of n: N (s log rho - log r).
    const double log_ratio = s * std::log(w.base_rate()) - log_r;
    if (log_ratio > 1e-12) {
        throw std::domain_error("weighted sum diverges: weight rate exceeds r");
    }

    if (w.kind() == WeightKind::poly && std::abs(log_ratio) <= 1e-12) {
        // sum_n scale * rho^{s(Nn+k)} r^{-Nn} (s(Nn+k))^{-alpha} = scale rho^{sk} (sN)^{-alpha} sum (n + k/N)^{-alpha}
        const double alpha = w.alpha();
        if (!(alpha > 1.0)) {
            throw std::domain_error("weighted sum diverges: power law with alpha <= 1 at matching rate");
        }
        const double lead = std::exp(log_scale + s * kd * std::log(w.base_rate()) - alpha * std::log(s * Nd));
        TailSum out;
        if (k == 0) {
            const TailSum h = hurwitz_sum(alpha, 1.0);
            out.value = w.scale() * std::exp(w.base_log_value(0)) + lead * h.value;
            out.error = lead * h.error;
        } else {
            const TailSum h = hurwitz_sum(alpha, kd / Nd);
            out.value = lead * h.value;
            out.error = lead * h.error;
        }
        out.cert = Certification::certified;
        return out;
    }

    auto log_term = [&](double n) {
        return log_scale + base_log_continuous(w, s * (Nd * n + kd)) - Nd * n * log_r;
    };
    const double m_mono = monotone_from(w, log_ratio / s);

    double head = 0.0;
    for (std::size_t n = 0; n < kMaxDirectTerms; ++n) {
        const std::size_t m = w.stride() * (N * n + k);
        const double term = std::exp(w.log_value(N * n + k) - Nd * static_cast<double>(n) * log_r);
        const bool continuous_ok = m >= 2 && static_cast<double>(m) >= m_mono;
        if (continuous_ok && n >= 1 && term <= tol * (head + term)) {
            // Decreasing summand: integral <= tail <= term + integral.
            const double n0 = static_cast<double>(n);
            boost::math::quadrature::exp_sinh<double> integrator;
            double quad_err = 0.0;
            const double integral = integrator.integrate(
                [&](double y) { return std::exp(log_term(n0 + y)); }, 0.0, std::numeric_limits<double>::infinity(),
                std::sqrt(std::numeric_limits<double>::epsilon()), &quad_err);
            TailSum out;
            out.value = head + integral + 0.5 * term;
            out.error = 0.5 * term + std::abs(quad_err) + 4.0 * std::numeric_limits<double>::epsilon() * out.value;
            out.cert = Certification::certified;
            return out;
        }
        head += term;
    }
    throw NonConvergence("weighted_strided_sum: tail did not fall below tolerance");
}

WMembershipReport check_W_membership(const WeightFn& w, double r, std::size_t horizon, std::size_t m_max) {
    require_positive_rate(r);
    if (m_max == 0 || horizon < 4 * m_max || horizon < 16) {
        throw std::invalid_argument("check_W_membership: horizon must be at least 4 * m_max (and 16)");
    }
    if (w.domain_size() <= horizon) {
        throw std::length_error("check_W_membership: table weight shorter than the horizon");
    }
    const std::size_t H = horizon;

    // g(i) = gamma(i) r^{-i}; the ratios in the definition are invariant
    // under this normalisation and it keeps every quantity O(1).
    const double log_r = std::log(r);
    std::vector<double> g(H + 1);
    for (std::size_t i = 0; i <= H; ++i) {
        g[i] = std::exp(w.log_value(i) - static_cast<double>(i) * log_r);
    }

    WMembershipReport rep;
    rep.ratio_target = 1.0 / r;
    auto ratio_at = [&](std::size_t n) { return std::exp(w.log_value(n - 1) - w.log_value(n)); };
    rep.ratio_limit_estimate = ratio_at(H);
    for (std::size_t n : {H / 4, H / 2, H}) {
        rep.ratio_residuals.push_back(std::abs(ratio_at(n) * r - 1.0));
    }

    std::vector<double> partial(H + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i <= H; ++i) {
        acc += g[i];
        partial[i] = acc;
    }
    rep.transform_partial = partial[H];
    rep.transform_increments = {partial[H / 4] - partial[H / 8], partial[H / 2] - partial[H / 4],
                                partial[H] - partial[H / 2]};
    const double inc1 = rep.transform_increments[2];
    const double inc2 = rep.transform_increments[1];
    const double inc3 = rep.transform_increments[0];
    const double growth_floor = 1e-6 * std::max(1.0, rep.transform_partial);
    if (inc1 <= growth_floor || (inc1 <= 0.9 * inc2 && inc2 <= 0.9 * inc3)) {
        rep.transform_tail_flag = TailTrend::converging;
    } else if (inc1 >= 0.95 * inc2) {
        rep.transform_tail_flag = TailTrend::growing;
    } else {
        rep.transform_tail_flag = TailTrend::undetermined;
    }

    // S_m(n) = sum_{i=m}^{n-m} g(n-i) g(i) = S_{m-1}(n) - 2 g(n-m+1) g(m-1)
    rep.p1_profile.assign(m_max, 0.0);
    for (std::size_t n = H / 2; n <= H; ++n) {
        double s = simd::rdot(g.data(), g.data(), n + 1);
        for (std::size_t m = 1; m <= m_max; ++m) {
            s -= 2.0 * g[n - m + 1] * g[m - 1];
            rep.p1_profile[m - 1] = std::max(rep.p1_profile[m - 1], std::max(s, 0.0) / g[n]);
        }
    }

    const double p_quarter = rep.p1_profile[std::max<std::size_t>(m_max / 4, 1) - 1];
    const double p_half = rep.p1_profile[std::max<std::size_t>(m_max / 2, 1) - 1];
    const double p_full = rep.p1_profile[m_max - 1];
    const bool p1_vanishing = p_full < 1e-3 || (p_full <= 0.9 * p_half && p_half <= 0.9 * p_quarter);

    const auto& res = rep.ratio_residuals;
    const bool ratio_settling = res[2] <= 1e-3 || (res[2] < res[1] && res[1] < res[0]);

    if (rep.transform_tail_flag == TailTrend::growing) {
        rep.verdict = Verdict::fail;
    } else if (rep.transform_tail_flag == TailTrend::converging && ratio_settling && p1_vanishing) {
        rep.verdict = Verdict::pass;
    } else {
        rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

SubsampledWeight subsample_weight(const WeightFn& phi, std::size_t N) {
    if (N == 0) {
        throw std::invalid_argument("subsample_weight: N must be positive");
    }
    SubsampledWeight out{phi.subsample(N), std::pow(phi.rate(), static_cast<double>(N))};
    return out;
}

} // namespace pervolt
