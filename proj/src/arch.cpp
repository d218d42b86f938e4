#include "pervolt/arch.hpp"

#include "pervolt/errors.hpp"
#include "pervolt/simd/kernels.hpp"
#include "pervolt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pervolt {

namespace {

Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

ArchModel ArchModel::two_periodic_poly(double a_odd, double a_even, double alpha, double lambda1) {
    ArchModel m;
    m.family = ArchFamily::two_periodic_poly;
    m.a_odd = a_odd;
    m.a_even = a_even;
    m.alpha = alpha;
    m.lambda1 = lambda1;
    m.validate();
    return m;
}

ArchModel ArchModel::from_table(std::vector<double> b, bool finite, double lambda1) {
    ArchModel m;
    m.family = ArchFamily::table;
    m.table = std::move(b);
    m.table_finite = finite;
    m.lambda1 = lambda1;
    m.validate();
    return m;
}

void ArchModel::validate() const {
    if (!nonneg_finite(a)) {
        throw std::invalid_argument("arch: intercept a must be nonnegative");
    }
    if (!nonneg_finite(lambda1)) {
        throw std::invalid_argument("arch: lambda1 must be nonnegative");
    }
    if (lambda2 && !nonneg_finite(*lambda2)) {
        throw std::invalid_argument("arch: lambda2 must be nonnegative");
    }
    if (lambda2 && *lambda2 < lambda1 * lambda1 * (1.0 - 1e-12)) {
        throw std::invalid_argument("arch: lambda2 must be at least lambda1^2");
    }
    if (var && !nonneg_finite(*var)) {
        throw std::invalid_argument("arch: var must be nonnegative");
    }
    if (family == ArchFamily::two_periodic_poly) {
        if (!nonneg_finite(a_odd) || !nonneg_finite(a_even)) {
            throw std::invalid_argument("arch: a_odd and a_even must be nonnegative");
        }
        if (!std::isfinite(alpha)) {
            throw std::invalid_argument("arch: alpha must be finite");
        }
        if (!(phi0 > 0.0)) {
            throw std::invalid_argument("arch: phi0 must be positive");
        }
    } else {
        if (table.empty()) {
            throw std::invalid_argument("arch: coefficient table is empty");
        }
        for (double v : table) {
            if (!nonneg_finite(v)) {
                throw std::invalid_argument("arch: coefficients b(j) must be nonnegative");
            }
        }
    }
}

double ArchModel::b(std::size_t j) const {
    if (j == 0) {
        throw std::out_of_range("arch: b(j) is defined for j >= 1");
    }
    if (family == ArchFamily::two_periodic_poly) {
        return (j % 2 == 0 ? a_even : a_odd) * std::pow(static_cast<double>(j), -alpha);
    }
    if (j > table.size()) {
        if (table_finite) {
            return 0.0;
        }
        throw std::out_of_range("arch: b(" + std::to_string(j) + ") beyond the coefficient table");
    }
    return table[j - 1];
}

WeightFn ArchModel::phi() const { return WeightFn::poly(1.0, alpha, phi0); }

SeriesPtr ArchModel::kernel() const {
    if (family == ArchFamily::two_periodic_poly) {
        // U(n) = lambda1 b(n+1) = pattern[(n+1) mod 2] (n+1)^-alpha
        std::vector<Matrix> pattern = {scalar_matrix(lambda1 * a_even), scalar_matrix(lambda1 * a_odd)};
        return std::make_shared<ModulatedSeries>(std::move(pattern), 1, WeightFn::poly(1.0, alpha, phi0));
    }
    std::vector<double> u(table.size());
    for (std::size_t n = 0; n < table.size(); ++n) {
        u[n] = lambda1 * table[n];
    }
    return std::make_shared<TableSeries>(MatSeq::scalar(u), table_finite);
}

MatSeq delta_sequence(const ArchModel& m, std::size_t n_max) {
    m.validate();
    if (m.lambda1 == 0.0) {
        throw std::invalid_argument("delta_sequence: lambda1 = 0 makes xi vanish identically");
    }
    const MatSeq U = m.kernel()->materialize(n_max);
    return solve_resolvent(U, n_max);
}

DecayCertificate DecayCertificate::finite() {
    DecayCertificate c;
    c.finite_support = true;
    c.cert = Certification::exact;
    return c;
}

DecayCertificate DecayCertificate::bounded_by(WeightFn w, double K, std::size_t from, Certification cert) {
    if (!(K >= 0.0) || !std::isfinite(K)) {
        throw std::invalid_argument("DecayCertificate: K must be finite and nonnegative");
    }
    DecayCertificate c;
    c.majorant = std::move(w);
    c.K = K;
    c.from = from;
    c.cert = cert;
    return c;
}

DecayCertificate delta_certificate(const MatSeq& delta, const WeightFn& phi) {
    if (delta.len() < 4 || delta.rows() != 1 || delta.cols() != 1) {
        throw std::invalid_argument("delta_certificate: need a scalar sequence of length >= 4");
    }
    double K = 0.0;
    for (std::size_t n = delta.len() / 2; n < delta.len(); ++n) {
        K = std::max(K, std::abs(delta.entry(n, 0, 0)) / phi(n));
    }
    return DecayCertificate::bounded_by(phi, 1.25 * K, delta.len() / 2, Certification::modeled);
}

ChiResult chi(const MatSeq& c, std::size_t u_max, const DecayCertificate& cert) {
    if (c.rows() != 1 || c.cols() != 1) {
        throw std::invalid_argument("chi: sequence must be scalar");
    }
    const std::size_t L = c.len();
    if (u_max >= L) {
        throw std::length_error("chi: u_max must be below the stored length");
    }
    const double* x = c.component(0, 0).data();
    ChiResult out;
    out.value.resize(u_max + 1);
    out.error.assign(u_max + 1, 0.0);
    for (std::size_t u = 0; u <= u_max; ++u) {
        out.value[u] = simd::dot(x, x + u, L - u);
    }
    if (cert.finite_support) {
        out.cert = cert.cert;
        return out;
    }
    if (!cert.majorant) {
        throw std::invalid_argument("chi: no square-summability certificate for the sequence");
    }
    const WeightFn& w = *cert.majorant;
    if (cert.from > L) {
        throw std::invalid_argument("chi: certificate starts beyond the stored prefix");
    }
    if (w.rate() > 1.0) {
        throw std::invalid_argument("chi: majorant must not grow geometrically");
    }
    out.cert = cert.cert;
    // j >= L: K^2 w(j) w(j+u) <= K^2 w(L+u) w(j), the majorant decreasing there
    const double tail_w = weighted_strided_sum(w, 1.0, 1, L).value;
    for (std::size_t u = 0; u <= u_max; ++u) {
        double straddle = 0.0;
        for (std::size_t j = L - u; j < L; ++j) {
            straddle += std::abs(x[j]) * cert.K * w(j + u);
        }
        out.error[u] = straddle + cert.K * cert.K * w(L + u) * tail_w;
    }
    return out;
}

StationarityReport stationarity_checks(const ArchModel& m, double tail_tol, std::size_t n_max) {
    m.validate();
    StationarityReport rep;

    ArchModel unit = m;
    unit.lambda1 = 1.0;
    const StridedSum sb = unit.kernel()->strided_sum(1.0, 1, 0, true, tail_tol);
    const double sum_b = sb.value(0, 0);
    const double err_b = sb.error(0, 0);

    rep.con1 = decide_below("con1", m.lambda1 * sum_b, m.lambda1 * err_b, 1.0, sb.cert);

    rep.con2.name = "con2";
    if (m.lambda2) {
        const double s = std::sqrt(*m.lambda2);
        rep.con2 = decide_below("con2", s * sum_b, s * err_b, 1.0, sb.cert);
        rep.con2_evaluable = true;
    }

    rep.con3.name = "con3";
    if (!m.var) {
        return rep;
    }
    if (*m.var == 0.0) {
        rep.con3 = decide_below("con3", 0.0, 0.0, 1.0, Certification::exact);
        rep.con3_evaluable = true;
        return rep;
    }
    if (rep.con1.verdict != Verdict::pass || m.lambda1 == 0.0) {
        return rep;
    }
    rep.con3_evaluable = true;

    const MatSeq delta = delta_sequence(m, n_max);
    const std::size_t len = delta.len();
    MatSeq bstar(1, 1, len);
    std::size_t b_len = len;
    if (m.family == ArchFamily::table && !m.table_finite) {
        b_len = std::min(len, m.table.size() + 1);
    }
    for (std::size_t j = 1; j < b_len; ++j) {
        bstar.entry(j, 0, 0) = m.b(j);
    }

    DecayCertificate dcert = DecayCertificate::finite();
    DecayCertificate bcert = DecayCertificate::finite();
    Certification cert = Certification::modeled;
    if (m.family == ArchFamily::two_periodic_poly) {
        const WeightFn w = WeightFn::poly(1.0, m.alpha, 1.0);
        dcert = delta_certificate(delta, m.phi());
        bcert = DecayCertificate::bounded_by(w, std::max(m.a_odd, m.a_even), 1, Certification::certified);
    } else if (!m.table_finite) {
        dcert.cert = Certification::prefix_only;
        bcert.cert = Certification::prefix_only;
        cert = Certification::prefix_only;
    }
    const std::size_t U = len / 2;
    const ChiResult cd = chi(delta, U, dcert);
    const ChiResult cb = chi(bstar.prefix(b_len), std::min(U, b_len - 1), bcert);
    double total = 0.0;
    double err = 0.0;
    const std::size_t u_top = std::min(U, b_len - 1);
    for (std::size_t u = 0; u <= u_top; ++u) {
        const double wgt = u == 0 ? 1.0 : 2.0;
        total += wgt * cd.value[u] * cb.value[u];
        err += wgt * (std::abs(cd.value[u]) * cb.error[u] + std::abs(cb.value[u]) * cd.error[u] +
                      cd.error[u] * cb.error[u]);
    }
    // lags beyond u_top, both factors decaying like a power: sum ~ last * u/3
    err += 2.0 * cd.value[u_top] * cb.value[u_top] * static_cast<double>(u_top) / 3.0;
    rep.con3 = decide_below("con3", *m.var * total, *m.var * err, 1.0, weakest(cert, weakest(cd.cert, cb.cert)));
    return rep;
}

ArchClosedForms closed_forms(const ArchModel& m, double tail_tol) {
    m.validate();
    if (m.family != ArchFamily::two_periodic_poly) {
        throw std::invalid_argument("closed_forms: needs the two-periodic polynomial family");
    }
    if (!(m.a_odd > 0.0) || !(m.a_even > 0.0) || !(m.lambda1 > 0.0)) {
        throw std::invalid_argument("closed_forms: a_odd, a_even and lambda1 must be positive");
    }
    const SeriesPtr U = m.kernel();
    const StridedSum s0 = U->strided_sum(1.0, 2, 0, false, tail_tol);
    const StridedSum s1 = U->strided_sum(1.0, 2, 1, false, tail_tol);
    ArchClosedForms cf;
    cf.S0 = s0.value(0, 0);
    cf.S1 = s1.value(0, 0);
    cf.cert = weakest(s0.cert, s1.cert);
    const ConditionResult con1 =
        decide_below("con1", cf.S0 + cf.S1, s0.error(0, 0) + s1.error(0, 0), 1.0, cf.cert);
    if (con1.verdict != Verdict::pass) {
        throw ConditionNotMet("closed_forms: condition con1 requires S0 + S1 < 1, got " + std::to_string(con1.value));
    }
    cf.a0 = m.lambda1 * m.a_odd;
    cf.a1 = m.lambda1 * m.a_even;
    cf.distinct_coefficients = cf.a0 != cf.a1;

    const double one_s1 = 1.0 - cf.S1;
    const double den = one_s1 * one_s1 - cf.S0 * cf.S0;
    cf.Lambda = 1.0 / (den * den);
    cf.T0 = cf.Lambda * 2.0 * cf.S0 * one_s1;
    cf.T1 = cf.Lambda * (cf.S0 * cf.S0 + one_s1 * one_s1);
    cf.d0 = cf.a0 * cf.T0 + cf.a1 * cf.T1;
    cf.d1 = cf.a1 * cf.T0 + cf.a0 * cf.T1;
    cf.sum_delta_even = one_s1 / den;
    cf.sum_delta_odd = cf.S0 / den;
    cf.tau0 = cf.T0 * cf.sum_delta_even + cf.T1 * cf.sum_delta_odd;
    cf.tau1 = cf.T1 * cf.sum_delta_even + cf.T0 * cf.sum_delta_odd;
    cf.ratio_even = m.lambda1 * (cf.a0 / cf.a1 * cf.tau0 + cf.tau1);
    cf.ratio_odd = m.lambda1 * (cf.a1 / cf.a0 * cf.tau0 + cf.tau1);
    return cf;
}

AutocovRatio autocov_ratio(const ArchModel& m, std::size_t u_max, std::size_t n_max) {
    if (u_max < 4) {
        throw std::invalid_argument("autocov_ratio: u_max must be at least 4");
    }
    if (n_max < 2 * u_max + 2) {
        throw std::length_error("autocov_ratio: n_max must be at least 2 u_max + 2");
    }
    const MatSeq delta = delta_sequence(m, n_max);
    DecayCertificate cert = DecayCertificate::finite();
    if (m.family == ArchFamily::two_periodic_poly) {
        cert = delta_certificate(delta, m.phi());
    } else {
        cert.cert = Certification::prefix_only;
    }
    const ChiResult c = chi(delta, 2 * u_max + 1, cert);

    AutocovRatio out;
    out.chi_delta = c.value;
    out.even.index = 0;
    out.odd.index = 1;
    for (std::size_t u = u_max / 2; u <= u_max; ++u) {
        const double be = m.b(2 * u);
        const double bo = m.b(2 * u + 1);
        if (!(be > 0.0) || !(bo > 0.0)) {
            throw std::invalid_argument("autocov_ratio: b vanishes at lag " + std::to_string(2 * u));
        }
        out.even.sample_n.push_back(u);
        out.even.samples.push_back(scalar_matrix(c.value[2 * u] / be));
        out.odd.sample_n.push_back(u);
        out.odd.samples.push_back(scalar_matrix(c.value[2 * u + 1] / bo));
    }
    fit_reciprocal(out.even);
    fit_reciprocal(out.odd);
    const double gap = std::abs(out.even.extrapolated(0, 0) - out.odd.extrapolated(0, 0));
    out.separated = gap > 5.0 * (out.even.est_error + out.odd.est_error);
    return out;
}

Verdict slower_than_exponential_check(const ArchModel& m, const std::vector<double>& zetas) {
    m.validate();
    if (zetas.empty()) {
        throw std::invalid_argument("slower_than_exponential_check: empty zeta grid");
    }
    for (double z : zetas) {
        if (!(z > 0.0 && z < 1.0)) {
            throw std::invalid_argument("slower_than_exponential_check: zeta must lie in (0, 1)");
        }
    }
    if (m.family == ArchFamily::two_periodic_poly) {
        // a power law beats every geometric sequence
        return (m.a_odd > 0.0 || m.a_even > 0.0) ? Verdict::pass : Verdict::fail;
    }
    const std::size_t K = m.table.size();
    if (K < 32) {
        return Verdict::inconclusive;
    }
    auto log_ratio_min = [&](std::size_t end, double zeta) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t j = end - 7; j <= end; ++j) {
            const double bj = m.table[j - 1];
            const double v = bj > 0.0 ? std::log(bj) - static_cast<double>(j) * std::log(zeta)
                                      : -std::numeric_limits<double>::infinity();
            lo = std::min(lo, v);
        }
        return lo;
    };
    for (double z : zetas) {
        if (!(log_ratio_min(K, z) > log_ratio_min(K / 2, z))) {
            return Verdict::fail;
        }
    }
    return Verdict::pass;
}

} // namespace pervolt
