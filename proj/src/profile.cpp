#include "pervolt/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pervolt {

AsymptoticProfile AsymptoticProfile::zero(std::size_t rows, std::size_t cols, std::size_t N, double r) {
    AsymptoticProfile p;
    p.r = r;
    p.N = N;
    p.limits.assign(N, Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
    return p;
}

std::string_view to_string(ResidualTrend t) noexcept {
    switch (t) {
    case ResidualTrend::decreasing:
        return "decreasing";
    case ResidualTrend::flat:
        return "flat";
    case ResidualTrend::increasing:
        return "increasing";
    }
    return "unknown";
}

void fit_reciprocal(ConvergenceReport& rep) {
    if (rep.samples.size() < 2 || rep.samples.size() != rep.sample_n.size()) {
        throw std::invalid_argument("fit_reciprocal: need at least two matching samples");
    }
    // Normal equations for value = c + e x with x = 1/n, entrywise.
    double sx = 0.0, sxx = 0.0;
    for (std::size_t n : rep.sample_n) {
        const double x = 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
        sx += x;
        sxx += x * x;
    }
    const std::size_t window = rep.samples.size();
    const double m = static_cast<double>(window);
    const double det = m * sxx - sx * sx;
    const Eigen::Index rows = rep.samples.front().rows();
    const Eigen::Index cols = rep.samples.front().cols();
    Matrix sy = Matrix::Zero(rows, cols);
    Matrix sxy = Matrix::Zero(rows, cols);
    for (std::size_t k = 0; k < window; ++k) {
        const double x = 1.0 / static_cast<double>(std::max<std::size_t>(rep.sample_n[k], 1));
        sy += rep.samples[k];
        sxy += x * rep.samples[k];
    }
    Matrix c, e;
    if (std::abs(det) > 1e-300) {
        c = (sxx * sy - sx * sxy) / det;
        e = (m * sxy - sx * sy) / det;
    } else {
        c = sy / m;
        e = Matrix::Zero(rows, cols);
    }
    rep.extrapolated = c;
    rep.est_error = e.cwiseAbs().maxCoeff() / static_cast<double>(std::max<std::size_t>(rep.sample_n.back(), 1));

    const double first = (rep.samples.front() - c).cwiseAbs().maxCoeff();
    const double last = (rep.samples.back() - c).cwiseAbs().maxCoeff();
    if (last <= 0.9 * first) {
        rep.residual_trend = ResidualTrend::decreasing;
    } else if (last >= 1.1 * first && last > 0.0) {
        rep.residual_trend = ResidualTrend::increasing;
    } else {
        rep.residual_trend = ResidualTrend::flat;
    }
}

ConvergenceReport estimate_limit_empirical(const MatSeq& S, const WeightFn& phi, std::size_t N, std::size_t i,
                                           std::size_t window) {
    if (N == 0 || i >= N) {
        throw std::invalid_argument("estimate_limit_empirical: need 0 <= i < N");
    }
    if (window < 2) {
        throw std::invalid_argument("estimate_limit_empirical: window must be at least 2");
    }
    if (S.len() <= N * window + i) {
        throw std::length_error("estimate_limit_empirical: sequence of length " + std::to_string(S.len()) +
                                " too short for window " + std::to_string(window));
    }
    const std::size_t n_end = (S.len() - 1 - i) / N;
    const std::size_t n_begin = n_end + 1 - window;

    ConvergenceReport rep;
    rep.index = i;
    rep.sample_n.reserve(window);
    rep.samples.reserve(window);
    for (std::size_t n = n_begin; n <= n_end; ++n) {
        rep.sample_n.push_back(n);
        // Division by phi(N n), never phi(N n + i).
        rep.samples.push_back(S.at(N * n + i) / phi(N * n));
    }

    fit_reciprocal(rep);
    return rep;
}

WPMembershipReport check_WP_membership(const MatSeq& U, const WeightFn& phi, std::size_t N, std::size_t horizon) {
    if (N == 0 || horizon < 4) {
        throw std::invalid_argument("check_WP_membership: need N >= 1 and horizon >= 4");
    }
    if (horizon * N + N - 1 >= U.len()) {
        throw std::length_error("check_WP_membership: kernel of length " + std::to_string(U.len()) +
                                " does not reach index horizon*N + N - 1");
    }
    const MatSeq head = U.prefix(horizon * N + N);
    WPMembershipReport out;
    out.profile.r = phi.rate();
    out.profile.N = N;
    out.profile.weight = phi;
    out.profile.cert = Certification::modeled;
    bool all_settled = true;
    bool any_diverging = false;
    for (std::size_t i = 0; i < N; ++i) {
        ConvergenceReport rep = estimate_limit_empirical(head, phi, N, i, horizon / 2);
        const double scale = std::max(1.0, rep.extrapolated.cwiseAbs().maxCoeff());
        if (rep.est_error > 1e-3 * scale) {
            all_settled = false;
        }
        if (rep.residual_trend == ResidualTrend::increasing && rep.est_error > 1e-3 * scale) {
            any_diverging = true;
        }
        out.profile.limits.push_back(rep.extrapolated);
        out.reports.push_back(std::move(rep));
    }
    out.verdict = any_diverging ? Verdict::fail : (all_settled ? Verdict::pass : Verdict::inconclusive);
    return out;
}

} // namespace pervolt
