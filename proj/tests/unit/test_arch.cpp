#include "catch_amalgamated.hpp"

#include "pervolt/arch.hpp"
#include "pervolt/errors.hpp"
#include "pervolt/volterra.hpp"

#include <cmath>
#include <numbers>

using namespace pervolt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi2 = std::numbers::pi * std::numbers::pi;

ArchModel remark_model() { return ArchModel::two_periodic_poly(0.5, 0.25, 2, 1); }

// agrees to five significant figures
bool sig5(double got, double want) { return std::abs(got - want) <= 0.5 * std::pow(10.0, std::floor(std::log10(want)) - 4); }

} // namespace

TEST_CASE("delta recursion") {
    const MatSeq d = delta_sequence(remark_model(), 50);
    CHECK(d.entry(0, 0, 0) == 1.0);
    CHECK_THAT(d.entry(1, 0, 0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(d.entry(2, 0, 0), WithinAbs(0.3125, 1e-15));

    const MatSeq z = delta_sequence(ArchModel::two_periodic_poly(0, 0, 2, 1), 20);
    CHECK(z.entry(0, 0, 0) == 1.0);
    for (std::size_t n = 1; n <= 20; ++n) CHECK(z.entry(n, 0, 0) == 0.0);

    CHECK_THROWS_AS(delta_sequence(ArchModel::two_periodic_poly(0.5, 0.25, 2, 0), 10), std::invalid_argument);
    CHECK_THROWS_AS(ArchModel::two_periodic_poly(-0.1, 0.25, 2, 1), std::invalid_argument);
    ArchModel bad = remark_model();
    bad.lambda2 = 0.5;
    bad.lambda1 = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("delta is the resolvent of lambda1 b(n+1)") {
    ArchModel m = remark_model();
    m.lambda1 = 0.8;
    const MatSeq d = delta_sequence(m, 600);
    std::vector<double> u(600);
    for (std::size_t n = 0; n < u.size(); ++n) u[n] = 0.8 * m.b(n + 1);
    const MatSeq z = solve_resolvent(MatSeq::scalar(u), 600);
    const MatSeq k = solve_resolvent(m.kernel()->materialize(600), 600);
    for (std::size_t n = 0; n <= 600; ++n) {
        CHECK(d.entry(n, 0, 0) == k.entry(n, 0, 0));
        // hand-built kernel rounds 0.8 * (0.5 j^-2) rather than (0.8 * 0.5) j^-2
        CHECK_THAT(d.entry(n, 0, 0), WithinRel(z.entry(n, 0, 0), 1e-13));
    }
}

TEST_CASE("delta approaches its limits") {
    const ArchModel m = remark_model();
    const MatSeq d = delta_sequence(m, 10001);
    const WeightFn phi = m.phi();
    CHECK(std::abs(d.entry(10000, 0, 0) / phi(10000) - 4.71699) < 0.01 * 4.71699);
    double even = 0;
    for (std::size_t j = 0; j <= 5000; ++j) even += d.entry(2 * j, 0, 0);
    const double S0 = pi2 / 16, S1 = pi2 / 96;
    const double closed = (1 - S1) / ((1 - S1) * (1 - S1) - S0 * S0);
    CHECK_THAT(closed, WithinAbs(2.113782, 5e-7));
    CHECK(std::abs(even - closed) < 0.005 * closed);
}

TEST_CASE("chi examples") {
    MatSeq imp(1, 1, 10);
    imp.entry(0, 0, 0) = 1;
    const ChiResult a = chi(imp, 5, DecayCertificate::finite());
    CHECK(a.value[0] == 1.0);
    for (std::size_t u = 1; u <= 5; ++u) CHECK(a.value[u] == 0.0);

    MatSeq g(1, 1, 200);
    for (std::size_t n = 0; n < 200; ++n) g.entry(n, 0, 0) = std::pow(0.5, double(n));
    const ChiResult b =
        chi(g, 10, DecayCertificate::bounded_by(WeightFn::poly(0.5, 0, 1), 1, 0, Certification::certified));
    CHECK_THAT(b.value[0], WithinRel(4.0 / 3, 1e-14));
    CHECK_THAT(b.value[1], WithinRel(2.0 / 3, 1e-14));
    for (std::size_t u = 0; u <= 10; ++u) {
        const double exact = std::pow(0.5, double(u)) * 4 / 3;
        CHECK(std::abs(b.value[u] - exact) <= b.error[u] + 1e-15);
    }
    MatSeq s(1, 1, 100);
    for (std::size_t n = 0; n < 100; ++n) s.entry(n, 0, 0) = 1.0 / (1.0 + n);
    CHECK_THROWS_AS(chi(s, 5, DecayCertificate{}), std::invalid_argument);
    CHECK_THROWS_AS(chi(s, 100, DecayCertificate::finite()), std::length_error);
}

TEST_CASE("chi of delta is nonnegative and summable") {
    const ArchModel m = remark_model();
    const MatSeq d = delta_sequence(m, 4000);
    const ChiResult c = chi(d, 1000, delta_certificate(d, m.phi()));
    double total = 0;
    for (std::size_t u = 0; u <= 1000; ++u) {
        CHECK(c.value[u] >= 0.0);
        total += c.value[u];
    }
    CHECK(std::isfinite(total));
    CHECK(c.cert == Certification::modeled);
}

TEST_CASE("stationarity conditions") {
    ArchModel m = remark_model();
    const StationarityReport r = stationarity_checks(m);
    CHECK_THAT(r.con1.value, WithinRel(7 * pi2 / 96, 1e-10));
    CHECK(r.con1.verdict == Verdict::pass);
    CHECK_FALSE(r.con2_evaluable);
    CHECK_FALSE(r.con3_evaluable);

    m.lambda2 = 1.0;
    m.var = 0.0;
    const StationarityReport s = stationarity_checks(m);
    CHECK(s.con2_evaluable);
    CHECK_THAT(s.con2.value, WithinAbs(0.719659, 5e-7));
    CHECK(s.con2.verdict == Verdict::pass);
    CHECK(s.con3.value == 0.0);
    CHECK(s.con3.verdict == Verdict::pass);

    const ArchModel heavy = ArchModel::two_periodic_poly(1.0, 1.0, 2, 1);
    CHECK(stationarity_checks(heavy).con1.verdict == Verdict::fail);
}

TEST_CASE("con3 against a direct double sum") {
    ArchModel m = ArchModel::from_table({0.3, 0.15, 0.05}, true, 1.0);
    m.lambda2 = 1.2;
    m.var = 0.2;
    const StationarityReport r = stationarity_checks(m, 1e-10, 2000);
    REQUIRE(r.con3_evaluable);
    const MatSeq d = delta_sequence(m, 2000);
    const double bs[4] = {0, 0.3, 0.15, 0.05};
    double sum = 0;
    for (int u = -3; u <= 3; ++u) {
        const int a = std::abs(u);
        double cd = 0, cb = 0;
        for (std::size_t j = 0; j + a <= 2000; ++j) cd += d.entry(j, 0, 0) * d.entry(j + a, 0, 0);
        for (int j = 0; j + a < 4; ++j) cb += bs[j] * bs[j + a];
        sum += cd * cb;
    }
    CHECK_THAT(r.con3.value, WithinRel(0.2 * sum, 1e-10));
    CHECK(r.con3.verdict == Verdict::pass);
}

TEST_CASE("closed forms of the two-periodic example") {
    const ArchClosedForms c = closed_forms(remark_model());
    CHECK_THAT(c.S0, WithinRel(pi2 / 16, 1e-12));
    CHECK_THAT(c.S1, WithinRel(pi2 / 96, 1e-12));
    CHECK(sig5(c.Lambda, 5.55073));
    CHECK(sig5(c.T0, 6.14391));
    CHECK(sig5(c.T1, 6.58015));
    CHECK(sig5(c.d0, 4.71699));
    CHECK(sig5(c.d1, 4.82605));
    CHECK(sig5(c.tau0, 22.5498));
    CHECK(sig5(c.ratio_even, 67.9375));
    CHECK(sig5(c.ratio_odd, 34.1128));
    CHECK(c.distinct_coefficients);

    // the alternative expression for tau0
    const double S0 = c.S0, S1 = c.S1;
    const double den = (1 - S1) * (1 - S1) - S0 * S0;
    CHECK_THAT(c.tau0, WithinRel(c.Lambda * S0 * (S0 * S0 + 3 * (1 - S1) * (1 - S1)) / den, 1e-12));
    CHECK(c.d0 != c.d1);
    CHECK(c.ratio_even / c.ratio_odd != 1.0);

    const ArchClosedForms eq = closed_forms(ArchModel::two_periodic_poly(0.4, 0.4, 2, 1));
    CHECK_FALSE(eq.distinct_coefficients);
    CHECK_THAT(eq.ratio_even, WithinRel(eq.ratio_odd, 1e-15));
    CHECK_THROWS_AS(closed_forms(ArchModel::two_periodic_poly(1.0, 1.0, 2, 1)), ConditionNotMet);
}

TEST_CASE("distinct coefficients give distinct limits") {
    for (double ao : {0.1, 0.3, 0.5})
        for (double ae : {0.05, 0.2, 0.45})
            for (double alpha : {1.8, 2.0, 3.0}) {
                const ArchModel m = ArchModel::two_periodic_poly(ao, ae, alpha, 1);
                if (!stationarity_checks(m).con1.holds()) continue;
                const ArchClosedForms c = closed_forms(m);
                CHECK(c.d0 != c.d1);
                CHECK(std::abs(c.ratio_even - c.ratio_odd) > 0.0);
                CHECK(c.tau0 > 0.0);
            }
}

TEST_CASE("slower than exponential decay") {
    CHECK(slower_than_exponential_check(ArchModel::two_periodic_poly(0.5, 0.5, 2, 1), {0.9}) == Verdict::pass);
    std::vector<double> geo(200), alt(2000);
    for (std::size_t j = 1; j <= 200; ++j) geo[j - 1] = std::pow(0.5, double(j));
    for (std::size_t j = 1; j <= 2000; ++j) alt[j - 1] = (j % 2 ? 1.0 : 3.0) / double(j * j);
    CHECK(slower_than_exponential_check(ArchModel::from_table(geo, false, 1), {0.9}) == Verdict::fail);
    CHECK(slower_than_exponential_check(ArchModel::from_table(alt, false, 1), {0.99}) == Verdict::pass);
    // j^-2 / 0.99^j bottoms out near j = 199, so a 200-term table still looks decaying
    alt.resize(200);
    CHECK(slower_than_exponential_check(ArchModel::from_table(alt, false, 1), {0.99}) == Verdict::fail);
    CHECK(slower_than_exponential_check(ArchModel::from_table({0.1, 0.2}, false, 1), {0.9}) == Verdict::inconclusive);
    CHECK_THROWS_AS(slower_than_exponential_check(remark_model(), {1.5}), std::invalid_argument);
}
