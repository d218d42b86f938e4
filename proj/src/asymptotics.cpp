#include "pervolt/asymptotics.hpp"

#include "pervolt/errors.hpp"
#include "pervolt/volterra.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace pervolt {

namespace {

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

void require_profile(const AsymptoticProfile& p, std::size_t N, std::size_t rows, std::size_t cols,
                     const char* what) {
    if (p.N != N || p.limits.size() != N) {
        throw std::invalid_argument(std::string(what) + ": profile must hold N = " + std::to_string(N) +
                                    " limit matrices");
    }
    for (const Matrix& m : p.limits) {
        if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
            throw std::invalid_argument(std::string(what) + ": limit matrix has the wrong shape");
        }
    }
}

double upper_spectral_radius(const Matrix& M) {
    const SpectralRadiusTrace t = spectral_radius_trace(M);
    return t.bounds.empty() ? t.estimate : *std::min_element(t.bounds.begin(), t.bounds.end());
}

} // namespace

AdmissibilityResult admissibility_from_transforms(const Matrix& F_transform, const Matrix& F_abs_bound,
                                                  const Matrix& F_abs_error, const Matrix& f_transform,
                                                  const Matrix& z0, double r, const Matrix& L_f,
                                                  const Matrix& L_F, Certification cert) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("admissibility: r must be positive");
    }
    const Eigen::Index d = F_transform.rows();
    if (F_transform.cols() != d || F_abs_bound.rows() != d || F_abs_bound.cols() != d || z0.rows() != d ||
        f_transform.rows() != d || f_transform.cols() != z0.cols() || L_f.rows() != d ||
        L_f.cols() != z0.cols() || L_F.rows() != d || L_F.cols() != d) {
        throw std::invalid_argument("admissibility: inconsistent shapes");
    }

    // rho(r^{-1} sum |F(i)| r^{-i}) on the interval of the certified sum
    const Matrix hi = (F_abs_bound + F_abs_error) / r;
    const Matrix lo = (F_abs_bound - F_abs_error).cwiseMax(0.0) / r;
    const double upper = upper_spectral_radius(hi);
    const double lower = std::max(0.0, spectral_radius(lo) - 1e-8);
    AdmissibilityResult res;
    res.condition = decide_below("spectral", 0.5 * (upper + lower), 0.5 * (upper - lower), 1.0, cert);
    res.cert = cert;
    if (res.condition.verdict != Verdict::pass) {
        throw ConditionNotMet("admissibility: spectral condition " + std::string(to_string(res.condition.verdict)) +
                              " (spectral radius in [" + std::to_string(lower) + ", " + std::to_string(upper) +
                              "], needs < 1)");
    }

    const Matrix M = r * Matrix::Identity(d, d) - F_transform;
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible()) {
        throw ConditionNotMet("admissibility: rI - F~(r) is singular");
    }
    res.z_transform = lu.solve(r * z0 + f_transform);
    res.limit = lu.solve(L_f + L_F * res.z_transform);
    return res;
}

AdmissibilityResult admissibility_limit(const Series& F, const Series& f, const Matrix& z0, const WeightFn& gamma,
                                        double r, const Matrix& L_f, const Matrix& L_F, double tail_tol) {
    if (std::abs(gamma.rate() - r) > 1e-12 * std::max(1.0, r)) {
        throw std::invalid_argument("admissibility_limit: weight rate " + std::to_string(gamma.rate()) +
                                    " differs from r = " + std::to_string(r));
    }
    const StridedSum Ft = F.strided_sum(r, 1, 0, false, tail_tol);
    const StridedSum Fa = F.strided_sum(r, 1, 0, true, tail_tol);
    const StridedSum ft = f.strided_sum(r, 1, 0, false, tail_tol);
    const Certification cert = weakest(weakest(Ft.cert, Fa.cert), ft.cert);
    return admissibility_from_transforms(Ft.value, Fa.value, Fa.error, ft.value, z0, r, L_f, L_F, cert);
}

AdmissibilityResult admissibility_limit(const MatSeq& F, const MatSeq& f, const Matrix& z0, const WeightFn& gamma,
                                        double r, const Matrix& L_f, const Matrix& L_F, double tail_tol) {
    return admissibility_limit(TableSeries(F, false), TableSeries(f, false), z0, gamma, r, L_f, L_F, tail_tol);
}

AsymptoticProfile predict_rho(const Series& U, const WeightFn& phi, double r, std::size_t N,
                              const AsymptoticProfile& A, double tail_tol) {
    if (N == 0) {
        throw std::invalid_argument("predict_rho: N must be positive");
    }
    if (U.rows() != U.cols()) {
        throw std::invalid_argument("predict_rho: kernel must be square");
    }
    const std::size_t d = U.rows();
    require_profile(A, N, d, d, "predict_rho");
    if (std::abs(phi.rate() - r) > 1e-12 * std::max(1.0, r)) {
        throw std::invalid_argument("predict_rho: weight rate differs from r");
    }

    const ConditionResult c3 = check_c3(U, r, N, tail_tol);
    if (c3.verdict != Verdict::pass) {
        throw ConditionNotMet("predict_rho: condition c3 " + std::string(to_string(c3.verdict)) + " (value " +
                              std::to_string(c3.value) + " +- " + std::to_string(c3.error) + ")");
    }

    const MatSeq head = U.materialize(N);
    const Matrix B = build_B(head, N);
    const Matrix C = toeplitz_inverse(B, N);
    const Matrix absC = C.cwiseAbs();

    const StridedSum Jt = lifted_J_transform(U, r, N, false, tail_tol);
    const StridedSum Ja = lifted_J_transform(U, r, N, true, tail_tol);

    // lim J(n)/Phi(n): A_{N+p-q-1} on and above the diagonal, A_{p-q-1} r^N below
    const double rN = std::pow(r, static_cast<double>(N));
    const Eigen::Index Nd = ix(N * d);
    Matrix LJ(Nd, Nd);
    for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t q = 0; q < N; ++q) {
            LJ.block(ix(p * d), ix(q * d), ix(d), ix(d)) =
                p <= q ? A.limits[N + p - q - 1] : Matrix(A.limits[p - q - 1] * rN);
        }
    }

    const MatSeq Z = solve_resolvent(head, N - 1);
    Matrix z0(Nd, ix(d));
    for (std::size_t i = 0; i < N; ++i) {
        z0.block(ix(i * d), 0, ix(d), ix(d)) = Z.at(i);
    }

    const Certification cert = weakest(weakest(c3.cert, weakest(Jt.cert, Ja.cert)), A.cert);
    const AdmissibilityResult adm =
        admissibility_from_transforms(C * Jt.value, absC * Ja.value, absC * Ja.error, Matrix::Zero(Nd, ix(d)), z0,
                                      rN, Matrix::Zero(Nd, ix(d)), C * LJ, cert);

    AsymptoticProfile out;
    out.r = r;
    out.N = N;
    out.weight = phi;
    out.cert = cert;
    for (std::size_t i = 0; i < N; ++i) {
        out.limits.push_back(adm.limit.block(ix(i * d), 0, ix(d), ix(d)));
    }
    return out;
}

AsymptoticProfile predict_rho(const MatSeq& U, const WeightFn& phi, double r, std::size_t N,
                              const AsymptoticProfile& A, double tail_tol) {
    return predict_rho(TableSeries(U, false), phi, r, N, A, tail_tol);
}

AsymptoticProfile predict_X_limit(const AsymptoticProfile& rho, const Series& Z, const Series& f, const Matrix& X0,
                                  const AsymptoticProfile& L, double r, std::size_t N, double tail_tol) {
    if (N == 0 || !(r > 0.0)) {
        throw std::invalid_argument("predict_X_limit: need N >= 1 and r > 0");
    }
    const std::size_t d = Z.rows();
    const std::size_t c = f.cols();
    require_profile(rho, N, d, d, "predict_X_limit (rho)");
    require_profile(L, N, d, c, "predict_X_limit (forcing limits)");
    if (f.rows() != d || static_cast<std::size_t>(X0.rows()) != d || static_cast<std::size_t>(X0.cols()) != c) {
        throw std::invalid_argument("predict_X_limit: forcing or initial value has the wrong shape");
    }

    const double rN = std::pow(r, -static_cast<double>(N));
    Certification cert = weakest(rho.cert, L.cert);

    // sum_j F_a(j) r^{-N j}, with f(0) := 0
    std::vector<Matrix> Fsum(N), Zsum(N);
    for (std::size_t a = 0; a < N; ++a) {
        StridedSum s = f.strided_sum(r, N, a, false, tail_tol);
        if (a == 0 && f.available() > 0) {
            s.value -= f.at(0);
        }
        Fsum[a] = s.value;
        cert = weakest(cert, s.cert);
        const StridedSum z = Z.strided_sum(r, N, a, false, tail_tol);
        Zsum[a] = z.value;
        cert = weakest(cert, z.cert);
    }

    AsymptoticProfile out;
    out.r = r;
    out.N = N;
    out.weight = rho.weight;
    out.cert = cert;
    for (std::size_t i = 0; i < N; ++i) {
        Matrix lim = rho.limits[i] * X0;
        for (std::size_t l = 0; l <= i; ++l) {
            lim += rho.limits[l] * Fsum[i - l];
            lim += Zsum[l] * L.limits[i - l];
        }
        for (std::size_t l = i + 1; l < N; ++l) {
            lim += rN * (rho.limits[l] * Fsum[N + i - l]);
            lim += rN * (Zsum[l] * L.limits[N + i - l]);
        }
        out.limits.push_back(lim);
    }
    return out;
}

AsymptoticProfile predict_X_limit(const AsymptoticProfile& rho, const MatSeq& Z, const Series& f, const Matrix& X0,
                                  const AsymptoticProfile& L, double r, std::size_t N, double tail_tol) {
    return predict_X_limit(rho, AsymptoticSeries(Z, rho), f, X0, L, r, N, tail_tol);
}

ConverseResult converse_check(const MatSeq& Z, const AsymptoticProfile& rho, const WeightFn& phi, double r,
                              std::size_t N, const ConditionResult& c5, double tail_tol) {
    if (c5.verdict != Verdict::pass) {
        throw ConditionNotMet("converse_check: condition c5 " + std::string(to_string(c5.verdict)) + " (value " +
                              std::to_string(c5.value) + ", threshold " + std::to_string(c5.threshold) + ")");
    }
    if (N == 0 || !Z.is_square()) {
        throw std::invalid_argument("converse_check: need N >= 1 and a square resolvent");
    }
    const std::size_t d = Z.d();
    require_profile(rho, N, d, d, "converse_check");
    if (Z.len() < 4 * N + 2) {
        throw std::length_error("converse_check: resolvent too short");
    }

    // Y(n) = -Z(n+1); lim Y(N n + i)/phi(N n) = -rho_{i+1}, or -r^N rho_0 for i = N-1
    const std::size_t len = Z.len() - 1;
    MatSeq Y(d, d, len);
    MatSeq f(d, d, len);
    for (std::size_t n = 0; n < len; ++n) {
        Y.set(n, -Z.at(n + 1));
        if (n >= 1) {
            f.set(n, Z.at(n + 1));
        }
    }
    AsymptoticProfile Yprof;
    Yprof.r = r;
    Yprof.N = N;
    Yprof.weight = phi;
    Yprof.cert = weakest(rho.cert, Certification::modeled);
    const double rN = std::pow(r, static_cast<double>(N));
    for (std::size_t i = 0; i < N; ++i) {
        Yprof.limits.push_back(i + 1 < N ? Matrix(-rho.limits[i + 1]) : Matrix(-rN * rho.limits[0]));
    }
    AsymptoticProfile Lprof = Yprof;
    for (Matrix& m : Lprof.limits) {
        m = -m;
    }

    const AsymptoticSeries Yseries(Y, Yprof);
    ConverseResult out;
    out.aux_condition = check_c3(Yseries, r, N, tail_tol);
    out.aux_condition.name = "c4";
    if (out.aux_condition.verdict != Verdict::pass) {
        throw ConditionNotMet("converse_check: auxiliary condition on Y " +
                              std::string(to_string(out.aux_condition.verdict)) + " (value " +
                              std::to_string(out.aux_condition.value) + ")");
    }
    out.aux_limits = predict_rho(Yseries, phi, r, N, Yprof, tail_tol);

    const MatSeq R = solve_resolvent(Y, len - 1);
    const AsymptoticSeries Rseries(R, out.aux_limits);
    const AsymptoticSeries fseries(f, Lprof);
    out.kernel_limits = predict_X_limit(out.aux_limits, Rseries, fseries, Z.at(1), Lprof, r, N, tail_tol);
    return out;
}

SumZBound verify_sumZ_bound(const Series& U, const MatSeq& Z, double r, std::size_t N, std::size_t T,
                            double tail_tol) {
    if (N == 0 || !(r > 0.0)) {
        throw std::invalid_argument("verify_sumZ_bound: need N >= 1 and r > 0");
    }
    if (Z.len() <= N * T + N - 1) {
        throw std::length_error("verify_sumZ_bound: resolvent needs index " + std::to_string(N * T + N - 1));
    }
    const std::size_t d = Z.d();
    const double rN = std::pow(r, -static_cast<double>(N));
    Matrix A = Matrix::Zero(ix(d), ix(d));
    for (std::size_t i = 0; i < N; ++i) {
        double damp = rN;
        for (std::size_t n = 0; n <= T; ++n) {
            A += damp * Z.at(N * n + i).cwiseAbs();
            damp *= rN;
        }
    }
    const StridedSum Bhat = weighted_kernel_sum(U, r, N, tail_tol);
    SumZBound out;
    out.lhs = A;
    out.rhs = rN * Matrix::Identity(ix(d), ix(d)) + (Bhat.value + Bhat.error) * A;
    out.cert = Bhat.cert;
    out.max_violation = (out.lhs - out.rhs).maxCoeff();
    const double slack = 1e-12 * std::max(1.0, out.rhs.cwiseAbs().maxCoeff());
    out.holds = out.max_violation <= slack;
    return out;
}

} // namespace pervolt
