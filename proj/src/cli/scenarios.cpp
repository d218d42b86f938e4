#include "pervolt/cli/scenarios.hpp"

#include "pervolt/arch.hpp"
#include "pervolt/asymptotics.hpp"
#include "pervolt/cli/output.hpp"
#include "pervolt/errors.hpp"
#include "pervolt/lift.hpp"
#include "pervolt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pervolt::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string sv(std::string_view s) { return std::string(s); }

ojson profile_json(const AsymptoticProfile& p) {
    ojson j;
    j["certification"] = sv(to_string(p.cert));
    auto lim = ojson::array();
    for (const Matrix& m : p.limits) {
        lim.push_back(to_json(m));
    }
    j["limits"] = lim;
    return j;
}

AsymptoticProfile sequence_limits(const SequenceSpec& s, const ScenarioConfig& cfg, const WeightFn& phi,
                                  std::size_t rows, std::size_t cols, std::string& source) {
    if (s.limits) {
        AsymptoticProfile p;
        p.r = cfg.r;
        p.N = cfg.N;
        p.weight = phi;
        p.limits = *s.limits;
        p.cert = Certification::exact;
        source = "config";
        return p;
    }
    if (const auto* m = dynamic_cast<const ModulatedSeries*>(s.series.get())) {
        source = "derived";
        return derive_limits(*m, phi, cfg.N);
    }
    if (const auto* t = dynamic_cast<const TableSeries*>(s.series.get()); t && t->finite()) {
        source = "finite support";
        AsymptoticProfile p = AsymptoticProfile::zero(rows, cols, cfg.N, cfg.r);
        p.weight = phi;
        return p;
    }
    // stored prefix of an infinite sequence: estimate from its tail
    const std::size_t avail = s.series->available();
    if (avail < 8 * cfg.N) {
        throw std::length_error("table of " + std::to_string(avail) + " terms is too short to estimate its limits");
    }
    const MatSeq S = s.series->materialize(avail);
    const std::size_t horizon = (avail - cfg.N) / cfg.N;
    source = "estimated";
    WPMembershipReport rep = check_WP_membership(S, phi, cfg.N, horizon);
    return rep.profile;
}

double rel_diff(const Matrix& pred, const Matrix& emp) {
    const double scale = pred.cwiseAbs().maxCoeff();
    const double diff = (pred - emp).cwiseAbs().maxCoeff();
    return scale > 0.0 ? diff / scale : diff;
}

std::filesystem::path scenario_dir(const ScenarioConfig& cfg, const RunOptions& opt) {
    return opt.out_dir / cfg.name;
}

std::vector<std::string> entry_header(const std::string& sym, std::size_t rows, std::size_t cols) {
    std::vector<std::string> h;
    for (std::size_t p = 0; p < rows; ++p) {
        for (std::size_t q = 0; q < cols; ++q) {
            h.push_back(sym + "_" + std::to_string(p + 1) + std::to_string(q + 1));
        }
    }
    return h;
}

// Predicted vs empirical limits, one row per (i, p, q).
std::string limit_table(const AsymptoticProfile& pred, const std::vector<ConvergenceReport>& emp) {
    CsvTable t({"i", "p", "q", "predicted", "empirical", "est_error", "abs_diff", "rel_diff"});
    for (std::size_t i = 0; i < pred.limits.size(); ++i) {
        const Matrix& P = pred.limits[i];
        const Matrix& E = emp[i].extrapolated;
        for (Eigen::Index p = 0; p < P.rows(); ++p) {
            for (Eigen::Index q = 0; q < P.cols(); ++q) {
                const double a = std::abs(P(p, q) - E(p, q));
                t.row({std::to_string(i), std::to_string(p + 1), std::to_string(q + 1), fmt(P(p, q)), fmt(E(p, q)),
                       fmt(emp[i].est_error), fmt(a), fmt(P(p, q) != 0.0 ? a / std::abs(P(p, q)) : a)});
            }
        }
    }
    return t.str();
}

std::string ratio_table(const std::vector<ConvergenceReport>& reps, std::size_t N, const std::string& sym) {
    const std::size_t rows = static_cast<std::size_t>(reps.front().samples.front().rows());
    const std::size_t cols = static_cast<std::size_t>(reps.front().samples.front().cols());
    std::vector<std::string> h{"i", "n", "index"};
    for (auto& s : entry_header(sym, rows, cols)) {
        h.push_back(s);
    }
    CsvTable t(h);
    for (const auto& rep : reps) {
        for (std::size_t k = 0; k < rep.samples.size(); ++k) {
            std::vector<std::string> cells{std::to_string(rep.index), std::to_string(rep.sample_n[k]),
                                           std::to_string(N * rep.sample_n[k] + rep.index)};
            for (std::size_t p = 0; p < rows; ++p) {
                for (std::size_t q = 0; q < cols; ++q) {
                    cells.push_back(
                        fmt(rep.samples[k](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q))));
                }
            }
            t.row(cells);
        }
    }
    return t.str();
}

std::string fixed(double v, int prec = 6) {
    std::ostringstream ss;
    ss.precision(prec);
    ss << v;
    return ss.str();
}

} // namespace

AsymptoticProfile kernel_limits(const ScenarioConfig& cfg, const WeightFn& phi) {
    std::string source;
    return sequence_limits(cfg.kernel, cfg, phi, cfg.d, cfg.d, source);
}

std::string run_resolvent(const ScenarioConfig& cfg, const RunOptions& opt) {
    const WeightFn& phi = *cfg.weight;
    const Series& U = *cfg.kernel.series;
    const auto dir = scenario_dir(cfg, opt);

    ojson summary;
    summary["scenario"] = cfg.name;
    summary["kind"] = "resolvent";
    const ConditionResult c3 = check_c3(U, cfg.r, cfg.N, cfg.tail_tol);
    summary["c3"] = to_json(c3);
    if (c3.verdict != Verdict::pass) {
        write_atomic(dir / "summary.json", dump(summary));
        throw ConditionNotMet("resolvent: condition c3 is " + sv(to_string(c3.verdict)) + " (value " +
                              fixed(c3.value) + ", threshold 1)");
    }
    std::string source;
    const AsymptoticProfile A = sequence_limits(cfg.kernel, cfg, phi, cfg.d, cfg.d, source);
    const AsymptoticProfile rho = predict_rho(U, phi, cfg.r, cfg.N, A, cfg.tail_tol);

    const MatSeq Um = U.materialize(cfg.n_max + 1);
    const MatSeq Z = solve_resolvent(Um, cfg.n_max);
    std::vector<ConvergenceReport> emp;
    for (std::size_t i = 0; i < cfg.N; ++i) {
        emp.push_back(estimate_limit_empirical(Z, phi, cfg.N, i, cfg.window));
    }

    summary["kernel_limits"] = profile_json(A);
    summary["kernel_limits"]["source"] = source;
    summary["rho"] = profile_json(rho);
    auto e = ojson::array();
    double worst = 0.0;
    for (const auto& rep : emp) {
        ojson r;
        r["i"] = rep.index;
        r["extrapolated"] = to_json(rep.extrapolated);
        r["est_error"] = rep.est_error;
        r["residual_trend"] = sv(to_string(rep.residual_trend));
        r["rel_diff"] = rel_diff(rho.limits[rep.index], rep.extrapolated);
        worst = std::max(worst, r["rel_diff"].get<double>());
        e.push_back(r);
    }
    summary["empirical"] = e;

    write_atomic(dir / "Z.csv", matseq_csv(Z, "Z"));
    write_atomic(dir / "ratios.csv", ratio_table(emp, cfg.N, "ratio"));
    write_atomic(dir / "rho.csv", limit_table(rho, emp));
    write_atomic(dir / "summary.json", dump(summary));
    return "resolvent " + cfg.name + ": c3 " + fixed(c3.value) + " " + sv(to_string(c3.verdict)) + ", rho_0(1,1) " +
           fixed(rho.limits[0](0, 0)) + ", empirical " + fixed(emp[0].extrapolated(0, 0)) + ", max rel diff " +
           fixed(worst, 3);
}

std::string run_solve(const ScenarioConfig& cfg, const RunOptions& opt) {
    const WeightFn& phi = *cfg.weight;
    const Series& U = *cfg.kernel.series;
    const auto dir = scenario_dir(cfg, opt);
    const auto cols = static_cast<std::size_t>(cfg.x0.cols());

    ojson summary;
    summary["scenario"] = cfg.name;
    summary["kind"] = "solve";
    const ConditionResult c3 = check_c3(U, cfg.r, cfg.N, cfg.tail_tol);
    summary["c3"] = to_json(c3);
    if (c3.verdict != Verdict::pass) {
        write_atomic(dir / "summary.json", dump(summary));
        throw ConditionNotMet("solve: condition c3 is " + sv(to_string(c3.verdict)) + " (value " + fixed(c3.value) +
                              ", threshold 1)");
    }
    std::string ksrc, fsrc;
    const AsymptoticProfile A = sequence_limits(cfg.kernel, cfg, phi, cfg.d, cfg.d, ksrc);
    const AsymptoticProfile L = sequence_limits(cfg.forcing, cfg, phi, cfg.d, cols, fsrc);
    const AsymptoticProfile rho = predict_rho(U, phi, cfg.r, cfg.N, A, cfg.tail_tol);

    const MatSeq Um = U.materialize(cfg.n_max + 1);
    const MatSeq fm = cfg.forcing.series->materialize(cfg.n_max + 1);
    const MatSeq Z = solve_resolvent(Um, cfg.n_max);
    const MatSeq X = solve_forced({Um, fm, cfg.x0}, cfg.n_max);
    const AsymptoticProfile pred =
        predict_X_limit(rho, Z, *cfg.forcing.series, cfg.x0, L, cfg.r, cfg.N, cfg.tail_tol);

    std::vector<ConvergenceReport> emp;
    for (std::size_t i = 0; i < cfg.N; ++i) {
        emp.push_back(estimate_limit_empirical(X, phi, cfg.N, i, cfg.window));
    }
    summary["kernel_limits"] = profile_json(A);
    summary["kernel_limits"]["source"] = ksrc;
    summary["forcing_limits"] = profile_json(L);
    summary["forcing_limits"]["source"] = fsrc;
    summary["rho"] = profile_json(rho);
    summary["x_limits"] = profile_json(pred);
    double worst = 0.0;
    auto e = ojson::array();
    for (const auto& rep : emp) {
        ojson r;
        r["i"] = rep.index;
        r["extrapolated"] = to_json(rep.extrapolated);
        r["est_error"] = rep.est_error;
        r["rel_diff"] = rel_diff(pred.limits[rep.index], rep.extrapolated);
        worst = std::max(worst, r["rel_diff"].get<double>());
        e.push_back(r);
    }
    summary["empirical"] = e;

    write_atomic(dir / "X.csv", matseq_csv(X, "X"));
    write_atomic(dir / "ratios.csv", ratio_table(emp, cfg.N, "ratio"));
    write_atomic(dir / "limits.csv", limit_table(pred, emp));
    write_atomic(dir / "summary.json", dump(summary));
    return "solve " + cfg.name + ": X limit_0(1,1) " + fixed(pred.limits[0](0, 0)) + ", empirical " +
           fixed(emp[0].extrapolated(0, 0)) + ", max rel diff " + fixed(worst, 3);
}

RandomKernel random_kernel(std::mt19937_64& rng, std::size_t N, double alpha_lo, double alpha_hi, double c3_lo,
                           double c3_hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RandomKernel k;
    k.N = N;
    k.alpha = alpha_lo + (alpha_hi - alpha_lo) * unit(rng);
    k.phi = WeightFn::poly(1.0, k.alpha, 1.0);
    std::vector<Matrix> P;
    for (std::size_t i = 0; i < N; ++i) {
        P.push_back(Matrix::Constant(1, 1, 0.1 + unit(rng)));
    }
    const double target = c3_lo + (c3_hi - c3_lo) * unit(rng);
    const double raw = check_c3(ModulatedSeries(P, 0, k.phi), 1.0, N).value;
    for (Matrix& m : P) {
        m *= target / raw;
    }
    k.U = std::make_shared<ModulatedSeries>(std::move(P), 0, k.phi);
    k.A = derive_limits(*k.U, k.phi, N);
    k.c3 = check_c3(*k.U, 1.0, N).value;
    return k;
}

SuiteRecord evaluate_random_kernel(const RandomKernel& k, std::size_t horizon, std::size_t sumZ_T,
                                   std::size_t lifted_terms, bool converse) {
    SuiteRecord rec;
    rec.kernel = k;
    const std::size_t N = k.N;
    const ConditionResult c3 = check_c3(*k.U, 1.0, N);
    rec.c3_holds = c3.holds();
    rec.spec_bound_holds = check_spec_bound(build_F(k.U, N, lifted_terms), 1.0).holds();
    const ConditionResult c5 = check_c5(*k.U, 1.0, N);
    rec.c5_holds = c5.holds();
    if (!rec.c3_holds) {
        return rec;
    }
    const AsymptoticProfile rho = predict_rho(*k.U, k.phi, 1.0, N, k.A);
    const std::size_t len = N * horizon + N;
    const MatSeq Z = solve_resolvent(k.U->materialize(len), len - 1);
    for (std::size_t i = 0; i < N; ++i) {
        const ConvergenceReport e = estimate_limit_empirical(Z, k.phi, N, i, horizon / 2);
        const double p = rho.limits[i](0, 0);
        const double a = std::abs(e.extrapolated(0, 0) - p);
        rec.rho_rel_err = std::max(rec.rho_rel_err, std::abs(p) < 1e-6 ? a / 1e-4 * 0.02 : a / std::abs(p));
    }
    rec.sumZ_holds = verify_sumZ_bound(*k.U, Z, 1.0, N, sumZ_T).holds;
    if (converse && rec.c5_holds) {
        const ConverseResult cr = converse_check(Z, rho, k.phi, 1.0, N, c5);
        rec.converse_rel_err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            rec.converse_rel_err = std::max(rec.converse_rel_err, rel_diff(k.A.limits[i], cr.kernel_limits.limits[i]));
        }
    }
    return rec;
}

std::string run_verify(const ScenarioConfig& cfg, const RunOptions& opt) {
    const auto dir = scenario_dir(cfg, opt);
    ojson doc;
    doc["scenario"] = cfg.name;
    doc["kind"] = "verify";
    std::ostringstream line;
    line << "verify " << cfg.name << ":";

    if (cfg.kernel.series) {
        const WeightFn& phi = *cfg.weight;
        const Series& U = *cfg.kernel.series;
        auto conds = ojson::array();
        auto skipped = ojson::array();
        auto note = [&](const std::string& name, const std::exception& e) {
            ojson s;
            s["name"] = name;
            s["reason"] = e.what();
            skipped.push_back(s);
        };

        const ConditionResult c3 = check_c3(U, cfg.r, cfg.N, cfg.tail_tol);
        const ConditionResult c5 = check_c5(U, cfg.r, cfg.N, cfg.tail_tol);
        conds.push_back(to_json(c3));
        conds.push_back(to_json(c5));
        line << " c3 " << fixed(c3.value) << " " << to_string(c3.verdict) << "; c5 " << to_string(c5.verdict);
        try {
            const ConditionResult sb =
                check_spec_bound(build_F(cfg.kernel.series, cfg.N, cfg.lifted_terms), cfg.r, cfg.tail_tol);
            conds.push_back(to_json(sb));
            line << "; spec_bound " << to_string(sb.verdict);
        } catch (const std::exception& e) {
            note("spec_bound", e);
        }

        MatSeq Z;
        try {
            Z = solve_resolvent(U.materialize(cfg.n_max + 1), cfg.n_max);
            const SumZBound s = verify_sumZ_bound(U, Z, cfg.r, cfg.N, cfg.sumZ_T, cfg.tail_tol);
            ojson j;
            j["name"] = "sumZ_bound";
            j["T"] = cfg.sumZ_T;
            j["max_violation"] = s.max_violation;
            j["verdict"] = s.holds ? "pass" : "fail";
            j["certification"] = sv(to_string(s.cert));
            j["lhs"] = to_json(s.lhs);
            j["rhs"] = to_json(s.rhs);
            conds.push_back(j);
            line << "; sumZ " << (s.holds ? "pass" : "fail");
        } catch (const std::exception& e) {
            note("sumZ_bound", e);
        }

        try {
            const WMembershipReport w = check_W_membership(phi, cfg.r, cfg.horizon);
            ojson j;
            j["name"] = "weight_in_W";
            j["verdict"] = sv(to_string(w.verdict));
            j["transform_tail"] = sv(to_string(w.transform_tail_flag));
            j["ratio_residuals"] = w.ratio_residuals;
            conds.push_back(j);
            line << "; weight " << to_string(w.verdict);
        } catch (const std::exception& e) {
            note("weight_in_W", e);
        }

        try {
            const MatSeq Um = U.materialize(cfg.n_max + 1);
            const WPMembershipReport wp = check_WP_membership(Um, phi, cfg.N, (Um.len() - cfg.N) / cfg.N);
            ojson j;
            j["name"] = "kernel_in_WP";
            j["verdict"] = sv(to_string(wp.verdict));
            j["estimate"] = profile_json(wp.profile);
            conds.push_back(j);
        } catch (const std::exception& e) {
            note("kernel_in_WP", e);
        }

        if (c5.holds() && c3.holds() && Z.len() > 0) {
            try {
                const AsymptoticProfile A = kernel_limits(cfg, phi);
                const AsymptoticProfile rho = predict_rho(U, phi, cfg.r, cfg.N, A, cfg.tail_tol);
                const ConverseResult cr = converse_check(Z, rho, phi, cfg.r, cfg.N, c5, cfg.tail_tol);
                double worst = 0.0;
                for (std::size_t i = 0; i < cfg.N; ++i) {
                    worst = std::max(worst, rel_diff(A.limits[i], cr.kernel_limits.limits[i]));
                }
                ojson j;
                j["name"] = "converse";
                j["aux_condition"] = to_json(cr.aux_condition);
                j["kernel_limits"] = profile_json(A);
                j["recovered"] = profile_json(cr.kernel_limits);
                j["max_rel_diff"] = worst;
                conds.push_back(j);
                line << "; converse rel diff " << fixed(worst, 3);
            } catch (const std::exception& e) {
                note("converse", e);
            }
        }
        doc["conditions"] = conds;
        doc["skipped"] = skipped;
    }

    if (cfg.random_suite) {
        const RandomSuiteSpec& s = *cfg.random_suite;
        std::mt19937_64 rng(opt.seed);
        CsvTable t({"id", "N", "alpha", "c3", "rho_rel_err", "spec_bound", "sumZ", "c5", "converse_rel_err"});
        std::size_t n_rho_ok = 0, n_c3 = 0, n_spec = 0, n_sumZ = 0, n_conv = 0, n_conv_ok = 0;
        double worst_rho = 0.0, worst_conv = 0.0;
        for (std::size_t id = 0; id < s.count; ++id) {
            const std::size_t N = s.periods[id % s.periods.size()];
            const RandomKernel k = random_kernel(rng, N, s.alpha_lo, s.alpha_hi, s.c3_lo, s.c3_hi);
            const SuiteRecord r = evaluate_random_kernel(k, s.horizon, s.sumZ_T, s.lifted_terms, s.converse);
            n_c3 += r.c3_holds;
            n_spec += r.c3_holds && r.spec_bound_holds;
            n_sumZ += r.sumZ_holds;
            n_rho_ok += r.c3_holds && r.rho_rel_err <= 0.02;
            worst_rho = std::max(worst_rho, r.rho_rel_err);
            if (r.converse_rel_err >= 0.0) {
                ++n_conv;
                n_conv_ok += r.converse_rel_err <= 0.02;
                worst_conv = std::max(worst_conv, r.converse_rel_err);
            }
            t.row({std::to_string(id), std::to_string(N), fmt(k.alpha), fmt(k.c3), fmt(r.rho_rel_err),
                   r.spec_bound_holds ? "pass" : "fail", r.sumZ_holds ? "pass" : "fail", r.c5_holds ? "pass" : "fail",
                   fmt(r.converse_rel_err)});
        }
        ojson j;
        j["seed"] = opt.seed;
        j["count"] = s.count;
        j["c3_holds"] = n_c3;
        j["rho_within_2pct"] = n_rho_ok;
        j["worst_rho_rel_err"] = worst_rho;
        j["spec_bound_given_c3"] = n_spec;
        j["sumZ_holds"] = n_sumZ;
        j["converse_runs"] = n_conv;
        j["converse_within_2pct"] = n_conv_ok;
        j["worst_converse_rel_err"] = worst_conv;
        doc["random_suite"] = j;
        write_atomic(dir / "random_suite.csv", t.str());
        line << " random suite: rho " << n_rho_ok << "/" << n_c3 << ", spec_bound " << n_spec << "/" << n_c3
             << ", sumZ " << n_sumZ << "/" << n_c3 << ", converse " << n_conv_ok << "/" << n_conv;
    }
    write_atomic(dir / "verdicts.json", dump(doc));
    return line.str();
}

std::string run_arch(const ScenarioConfig& cfg, const RunOptions& opt) {
    const ArchModel& m = *cfg.arch;
    const auto dir = scenario_dir(cfg, opt);
    ojson doc;
    doc["scenario"] = cfg.name;
    doc["kind"] = "arch";

    const StationarityReport st = stationarity_checks(m, cfg.tail_tol, cfg.n_max);
    ojson sj;
    sj["con1"] = to_json(st.con1);
    if (st.con2_evaluable) {
        sj["con2"] = to_json(st.con2);
    }
    if (st.con3_evaluable) {
        sj["con3"] = to_json(st.con3);
    }
    doc["stationarity"] = sj;
    if (st.con1.verdict != Verdict::pass) {
        write_atomic(dir / "closed_forms.json", dump(doc));
        throw ConditionNotMet("arch: condition con1 (lambda1 sum b(j) < 1) is " + sv(to_string(st.con1.verdict)) +
                              ", value " + fixed(st.con1.value));
    }

    std::optional<ArchClosedForms> cf;
    if (m.family == ArchFamily::two_periodic_poly) {
        cf = closed_forms(m, cfg.tail_tol);
        ojson c;
        c["S0"] = cf->S0;
        c["S1"] = cf->S1;
        c["a0"] = cf->a0;
        c["a1"] = cf->a1;
        c["Lambda"] = cf->Lambda;
        c["T0"] = cf->T0;
        c["T1"] = cf->T1;
        c["d0"] = cf->d0;
        c["d1"] = cf->d1;
        c["sum_delta_even"] = cf->sum_delta_even;
        c["sum_delta_odd"] = cf->sum_delta_odd;
        c["tau0"] = cf->tau0;
        c["tau1"] = cf->tau1;
        c["ratio_even"] = cf->ratio_even;
        c["ratio_odd"] = cf->ratio_odd;
        c["distinct_coefficients"] = cf->distinct_coefficients;
        c["certification"] = sv(to_string(cf->cert));
        doc["closed_forms"] = c;
    }

    const MatSeq delta = delta_sequence(m, cfg.n_max);
    const AutocovRatio ar = autocov_ratio(m, cfg.u_max, cfg.n_max);
    ojson aj;
    aj["u_max"] = cfg.u_max;
    aj["n_max"] = cfg.n_max;
    aj["even"] = ar.even.extrapolated(0, 0);
    aj["even_est_error"] = ar.even.est_error;
    aj["odd"] = ar.odd.extrapolated(0, 0);
    aj["odd_est_error"] = ar.odd.est_error;
    aj["separated"] = ar.separated;
    if (cf) {
        aj["even_rel_diff"] = std::abs(ar.even.extrapolated(0, 0) / cf->ratio_even - 1.0);
        aj["odd_rel_diff"] = std::abs(ar.odd.extrapolated(0, 0) / cf->ratio_odd - 1.0);
    }
    doc["autocov_ratio"] = aj;
    if (m.family == ArchFamily::two_periodic_poly) {
        std::vector<ConvergenceReport> dl;
        for (std::size_t i = 0; i < 2; ++i) {
            dl.push_back(estimate_limit_empirical(delta, m.phi(), 2, i, (cfg.n_max + 1) / 4));
        }
        ojson dj;
        dj["d0"] = dl[0].extrapolated(0, 0);
        dj["d1"] = dl[1].extrapolated(0, 0);
        dj["est_error"] = std::max(dl[0].est_error, dl[1].est_error);
        doc["delta_limits_empirical"] = dj;
    }
    doc["slower_than_exponential"] = sv(to_string(slower_than_exponential_check(m, {0.5, 0.9, 0.99})));

    std::string verdict;
    if (cf) {
        const double gap = std::abs(cf->ratio_even - cf->ratio_odd);
        if (gap <= 1e-9 * std::max(cf->ratio_even, cf->ratio_odd)) {
            verdict = "not refuted: even and odd ratios equal (" + fixed(cf->ratio_even) + ")";
        } else if (ar.separated) {
            verdict = "refuted: chi_delta(u) ~ C b(u) fails, ratio even " + fixed(cf->ratio_even) + " vs odd " +
                      fixed(cf->ratio_odd) + " (empirical " + fixed(ar.even.extrapolated(0, 0)) + " / " +
                      fixed(ar.odd.extrapolated(0, 0)) + ")";
        } else {
            verdict = "inconclusive: closed-form ratios differ (" + fixed(cf->ratio_even) + " vs " +
                      fixed(cf->ratio_odd) + ") but the empirical estimates are not separated";
        }
    } else {
        verdict = ar.separated ? "refuted: empirical even/odd ratios separated (" +
                                     fixed(ar.even.extrapolated(0, 0)) + " vs " + fixed(ar.odd.extrapolated(0, 0)) + ")"
                               : "not refuted: empirical even/odd ratios not separated";
    }
    doc["summary"] = verdict;

    CsvTable chi_t({"u", "chi_delta"});
    for (std::size_t u = 0; u < ar.chi_delta.size(); ++u) {
        chi_t.row({std::to_string(u), fmt(ar.chi_delta[u])});
    }
    CsvTable ratio_t({"u", "ratio_even", "ratio_odd"});
    for (std::size_t k = 0; k < ar.even.samples.size(); ++k) {
        ratio_t.row(
            {std::to_string(ar.even.sample_n[k]), fmt(ar.even.samples[k](0, 0)), fmt(ar.odd.samples[k](0, 0))});
    }
    write_atomic(dir / "delta.csv", matseq_csv(delta, "delta"));
    write_atomic(dir / "chi.csv", chi_t.str());
    write_atomic(dir / "ratios.csv", ratio_t.str());
    write_atomic(dir / "closed_forms.json", dump(doc));
    write_atomic(dir / "summary.txt", verdict + "\n");
    return "arch " + cfg.name + ": " + verdict;
}

std::string run_weights(const ScenarioConfig& cfg, const RunOptions& opt) {
    const auto dir = scenario_dir(cfg, opt);
    ojson doc;
    doc["scenario"] = cfg.name;
    doc["kind"] = "weights";
    doc["horizon"] = cfg.horizon;
    auto list = ojson::array();
    CsvTable t({"name", "kind", "r", "verdict", "transform_tail", "ratio_estimate", "ratio_target"});
    std::ostringstream line;
    line << "weights " << cfg.name << ":";
    for (const auto& [name, w] : cfg.weights) {
        const WMembershipReport rep = check_W_membership(w, w.rate(), cfg.horizon);
        ojson j;
        j["name"] = name;
        j["kind"] = sv(to_string(w.kind()));
        j["r"] = w.rate();
        j["verdict"] = sv(to_string(rep.verdict));
        j["ratio_limit_estimate"] = rep.ratio_limit_estimate;
        j["ratio_target"] = rep.ratio_target;
        j["ratio_residuals"] = rep.ratio_residuals;
        j["transform_partial"] = rep.transform_partial;
        j["transform_increments"] = rep.transform_increments;
        j["transform_tail"] = sv(to_string(rep.transform_tail_flag));
        j["p1_profile"] = rep.p1_profile;
        list.push_back(j);
        t.row({name, sv(to_string(w.kind())), fmt(w.rate()), sv(to_string(rep.verdict)),
               sv(to_string(rep.transform_tail_flag)), fmt(rep.ratio_limit_estimate), fmt(rep.ratio_target)});
        line << " " << name << " " << to_string(rep.verdict) << ";";
    }
    doc["weights"] = list;
    write_atomic(dir / "weights.json", dump(doc));
    write_atomic(dir / "weights.csv", t.str());
    std::string s = line.str();
    s.pop_back();
    return s;
}

std::string run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
    switch (cfg.kind) {
    case ScenarioKind::resolvent:
        return run_resolvent(cfg, opt);
    case ScenarioKind::solve:
        return run_solve(cfg, opt);
    case ScenarioKind::verify:
        return run_verify(cfg, opt);
    case ScenarioKind::arch:
        return run_arch(cfg, opt);
    case ScenarioKind::weights:
        return run_weights(cfg, opt);
    }
    throw std::logic_error("run_scenario: unknown kind");
}

} // namespace pervolt::cli
