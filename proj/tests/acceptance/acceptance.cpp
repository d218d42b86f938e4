// Acceptance run: one PASS/FAIL line per criterion.

#include "pervolt/arch.hpp"
#include "pervolt/asymptotics.hpp"
#include "pervolt/cli/scenarios.hpp"
#include "pervolt/lift.hpp"
#include "pervolt/volterra.hpp"
#include "pervolt/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pervolt;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream note;

    void expect(bool c, const std::string& what) {
        if (!c) {
            ok = false;
            note << " [failed: " << what << "]";
        }
    }
};

bool sig5(double got, double want) {
    return std::abs(got - want) <= 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(want))) - 4);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double max_rel(const MatSeq& a, const MatSeq& b) {
    double worst = 0;
    for (std::size_t n = 0; n < std::min(a.len(), b.len()); ++n) {
        const double s = std::max(1.0, b.at(n).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a.at(n) - b.at(n)).cwiseAbs().maxCoeff() / s);
    }
    return worst;
}

MatSeq random_seq(std::mt19937_64& rng, std::size_t d, std::size_t c, std::size_t len, double scale) {
    std::uniform_real_distribution<double> u(-1, 1);
    MatSeq S(d, c, len);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = 0; q < c; ++q) S.entry(n, p, q) = scale * u(rng);
    return S;
}

const ArchModel remark = ArchModel::two_periodic_poly(0.5, 0.25, 2, 1);
constexpr double pi2 = std::numbers::pi * std::numbers::pi;

void ac1(Outcome& o) {
    const ArchClosedForms c = closed_forms(remark);
    o.expect(sig5(c.S0, pi2 / 16), "S0");
    o.expect(sig5(c.S1, pi2 / 96), "S1");
    o.expect(sig5(c.Lambda, 5.55073), "Lambda");
    o.expect(sig5(c.T0, 6.14391), "T0");
    o.expect(sig5(c.T1, 6.58015), "T1");
    o.expect(sig5(c.d0, 4.71699), "d0");
    o.expect(sig5(c.d1, 4.82605), "d1");
    o.note << "Lambda=" << c.Lambda << " T0=" << c.T0 << " T1=" << c.T1 << " d0=" << c.d0 << " d1=" << c.d1;
}

void ac2(Outcome& o) {
    const ArchClosedForms c = closed_forms(remark);
    o.expect(sig5(c.ratio_even, 67.9375), "ratio_even");
    o.expect(sig5(c.ratio_odd, 34.1128), "ratio_odd");
    o.expect(sig5(c.tau0, 22.5498), "tau0");
    o.note << "ratio_even=" << c.ratio_even << " ratio_odd=" << c.ratio_odd << " tau0=" << c.tau0;
}

void ac3(Outcome& o) {
    const MatSeq d = delta_sequence(remark, 10000);
    const WeightFn phi = remark.phi();
    const ConvergenceReport e = estimate_limit_empirical(d, phi, 2, 0, 1000);
    const ConvergenceReport od = estimate_limit_empirical(d, phi, 2, 1, 1000);
    o.expect(rel(e.extrapolated(0, 0), 4.71699) < 0.01, "even limit");
    o.expect(rel(od.extrapolated(0, 0), 4.82605) < 0.01, "odd limit");
    o.note << "even " << e.extrapolated(0, 0) << " odd " << od.extrapolated(0, 0);
}

void ac4(Outcome& o) {
    const AutocovRatio a = autocov_ratio(remark, 512, 10000);
    const double ev = a.even.extrapolated(0, 0), od = a.odd.extrapolated(0, 0);
    o.expect(rel(ev, 67.9375) < 0.03, "even ratio");
    o.expect(rel(od, 34.1128) < 0.03, "odd ratio");
    o.expect(a.separated, "separation");
    o.note << "even " << ev << " (+-" << a.even.est_error << ") odd " << od << " (+-" << a.odd.est_error << ")";
}

void ac5(Outcome& o) {
    std::mt19937_64 rng(5);
    double toe = 0, res = 0, com = 0, lift = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + t % 4, N = 1 + (t / 4) % 16;
        if (N * d > 64) continue;
        const Matrix B = build_B(random_seq(rng, d, d, N, 1.0 / double(N * d)), N);
        const Matrix I = Matrix::Identity(B.rows(), B.cols());
        toe = std::max(toe, (toeplitz_inverse(B, N) - (I - B).inverse()).cwiseAbs().maxCoeff());
    }
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + t % 3, n_max = 20 + t % 15;
        const MatSeq U = random_seq(rng, d, d, n_max, 0.8 / double(d));
        const MatSeq Z = solve_resolvent(U, n_max);
        res = std::max(res, max_rel(neumann_representation(U, n_max), Z));
        const MatSeq f = random_seq(rng, d, 1, n_max + 1, 1.0);
        const Matrix X0 = random_seq(rng, d, 1, 1, 1.0).at(0);
        res = std::max(res, max_rel(variation_of_constants(Z, f, X0), solve_forced({U, f, X0}, n_max)));
        const MatSeq UZ = convolve(U, Z), ZU = convolve(Z, U);
        MatSeq shifted(d, d, n_max);
        for (std::size_t n = 0; n < n_max; ++n) shifted.set(n, Z.at(n + 1));
        com = std::max({com, max_rel(UZ.prefix(n_max), shifted), max_rel(ZU.prefix(n_max), shifted)});
    }
    for (int t = 0; t < 20; ++t) {
        const std::size_t N = 2 + t % 2, d = 1 + (t / 2) % 2, n_max = 25;
        const MatSeq U = random_seq(rng, d, d, N * (n_max + 2), 0.4);
        const LiftedSystem sys = build_F(U, N, n_max);
        const MatSeq Z = solve_resolvent(U, N * (n_max + 1));
        auto hat = [&](std::size_t n) {
            Matrix h(N * d, d);
            for (std::size_t p = 0; p < N; ++p) h.block(p * d, 0, d, d) = Z.at(N * n + p);
            return h;
        };
        for (std::size_t n = 1; n <= n_max; ++n) {
            Matrix acc = Matrix::Zero(N * d, d);
            for (std::size_t j = 0; j < n; ++j) acc += sys.F.at(n - 1 - j) * hat(j);
            const Matrix ref = hat(n);
            lift = std::max(lift, (acc - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
    }
    o.expect(toe < 1e-12, "toeplitz inverse");
    o.expect(res < 1e-12, "resolvent representations");
    o.expect(com < 1e-12, "commutation");
    o.expect(lift < 1e-12, "lifted identity");
    o.note << "toeplitz " << toe << " representations " << res << " commutation " << com << " lifted " << lift;
}

// shared by criteria 6 to 8
std::vector<cli::SuiteRecord> population;

void build_population() {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 60; ++t) {
        const cli::RandomKernel k = cli::random_kernel(rng, 1 + t % 3, 1.5, 3.0, 0.2, 0.9);
        population.push_back(cli::evaluate_random_kernel(k, 5000, 2000, 200, false));
    }
}

void ac6(Outcome& o) {
    build_population();
    double worst = 0;
    int ok = 0;
    for (const auto& r : population) {
        worst = std::max(worst, r.rho_rel_err);
        ok += r.c3_holds && r.rho_rel_err < 0.02;
    }
    o.expect(ok == int(population.size()), "agreement");
    o.note << ok << "/" << population.size() << " kernels, worst relative gap " << worst;
}

void ac7(Outcome& o) {
    int c3 = 0, both = 0;
    for (const auto& r : population) {
        c3 += r.c3_holds;
        both += r.c3_holds && r.spec_bound_holds;
    }
    o.expect(c3 >= 50 && both == c3, "spectral bound");
    o.note << both << "/" << c3 << " kernels with c3 also pass the spectral bound";
}

void ac8(Outcome& o) {
    int c3 = 0, ok = 0;
    for (const auto& r : population) {
        c3 += r.c3_holds;
        ok += r.c3_holds && r.sumZ_holds;
    }
    o.expect(c3 >= 50 && ok == c3, "summability");
    o.note << ok << "/" << c3 << " kernels satisfy the inequality at T=2000";
}

void ac9(Outcome& o) {
    std::mt19937_64 rng(9);
    int n = 0, ok = 0;
    double worst = 0;
    for (int t = 0; t < 24; ++t) {
        const cli::RandomKernel k = cli::random_kernel(rng, 1 + t % 3, 1.5, 3.0, 0.1, 0.45);
        const cli::SuiteRecord r = cli::evaluate_random_kernel(k, 5000, 200, 100, true);
        if (!r.c5_holds) continue;
        ++n;
        worst = std::max(worst, r.converse_rel_err);
        ok += r.converse_rel_err >= 0 && r.converse_rel_err < 0.02;
    }
    o.expect(n >= 20 && ok == n, "round trip");
    o.note << ok << "/" << n << " kernels recovered, worst relative gap " << worst;
}

void ac10(Outcome& o) {
    std::vector<double> geo(2049);
    for (std::size_t i = 0; i < geo.size(); ++i) geo[i] = std::pow(0.9, double(i));
    struct Case {
        const char* name;
        WeightFn w;
        double r;
        Verdict want;
    };
    const std::vector<Case> cases = {
        {"poly(1,2)", WeightFn::poly(1, 2, 1), 1, Verdict::pass},
        {"poly(0.8,1.5)", WeightFn::poly(0.8, 1.5, 1), 0.8, Verdict::pass},
        {"poly_stretch", WeightFn::poly_stretch(1, 1, 0.5, 1), 1, Verdict::pass},
        {"log_exp", WeightFn::log_exp(0.9, 1, 1), 0.9, Verdict::pass},
        {"table(0.9^n)", WeightFn::table(geo), 0.9, Verdict::fail},
        {"poly(1,1)", WeightFn::poly(1, 1, 1), 1, Verdict::fail},
        {"poly(0.9,1)", WeightFn::poly(0.9, 1, 1), 0.9, Verdict::fail},
    };
    int agree = 0;
    for (const Case& c : cases) {
        const Verdict v = check_W_membership(c.w, c.r, 2048).verdict;
        agree += v == c.want;
        o.note << c.name << "=" << to_string(v) << " ";
    }
    o.expect(agree == int(cases.size()), "classification");
}

} // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* what;
        double budget_s;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> all = {
        {"AC1", "closed-form limits of the two-periodic example", 0.1, ac1},
        {"AC2", "autocovariance ratio constants", 0.1, ac2},
        {"AC3", "empirical delta limits", 10, ac3},
        {"AC4", "empirical autocovariance ratios", 60, ac4},
        {"AC5", "oracle equivalence suite", 60, ac5},
        {"AC6", "predicted vs simulated resolvent limits", 300, ac6},
        {"AC7", "c3 implies the spectral bound", 300, ac7},
        {"AC8", "resolvent summability inequality", 300, ac8},
        {"AC9", "converse round trip", 300, ac9},
        {"AC10", "weight classification", 60, ac10},
    };
    int failed = 0;
    for (const Criterion& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.note << " [exception: " << e.what() << "]";
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s > c.budget_s) {
            o.ok = false;
            o.note << " [over the " << c.budget_s << " s budget]";
        }
        failed += !o.ok;
        std::printf("%s %s: %s (%.3f s) %s\n", o.ok ? "PASS" : "FAIL", c.id, c.what, s, o.note.str().c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
