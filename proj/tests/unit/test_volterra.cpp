#include "catch_amalgamated.hpp"

#include "pervolt/volterra.hpp"

#include <cmath>
#include <random>

using namespace pervolt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MatSeq random_kernel(std::mt19937_64& rng, std::size_t d, std::size_t len, double scale, bool nonneg = false) {
    std::uniform_real_distribution<double> u(nonneg ? 0.0 : -1.0, 1.0);
    MatSeq U(d, d, len);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = 0; q < d; ++q) U.entry(n, p, q) = scale * u(rng) / ((n + 1.0) * (n + 1.0));
    return U;
}

double rel_diff(const MatSeq& a, const MatSeq& b) {
    double m = 0, s = 0;
    for (std::size_t n = 0; n < std::min(a.len(), b.len()); ++n) {
        m = std::max(m, (a.at(n) - b.at(n)).cwiseAbs().maxCoeff());
        s = std::max(s, b.at(n).cwiseAbs().maxCoeff());
    }
    return m / std::max(s, 1e-300);
}

// the recursion written out index by index
MatSeq oracle_forced(const MatSeq& U, const MatSeq& f, const Matrix& X0, std::size_t n_max) {
    std::vector<Matrix> X{X0};
    for (std::size_t n = 0; n < n_max; ++n) {
        Matrix acc = f.at(n + 1);
        for (std::size_t j = 0; j <= n; ++j) acc += U.at(n - j) * X[j];
        X.push_back(acc);
    }
    return MatSeq::from_matrices(X);
}

} // namespace

TEST_CASE("forced equation examples") {
    std::vector<double> f(11);
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = n;
    const MatSeq X = solve_forced({MatSeq(1, 1, 10), MatSeq::scalar(f), Matrix::Constant(1, 1, 7.0)}, 10);
    CHECK(X.entry(0, 0, 0) == 7.0);
    for (std::size_t n = 1; n <= 10; ++n) CHECK(X.entry(n, 0, 0) == double(n));

    std::vector<double> u(12, 0.0);
    u[0] = 0.8;
    const MatSeq G = solve_forced({MatSeq::scalar(u), MatSeq(1, 1, 13), Matrix::Constant(1, 1, 1.0)}, 12);
    for (std::size_t n = 0; n <= 12; ++n) CHECK_THAT(G.entry(n, 0, 0), WithinRel(std::pow(0.8, n), 1e-14));

    std::mt19937_64 rng(21);
    const MatSeq U = random_kernel(rng, 1, 60, 0.5);
    std::vector<double> fv(61);
    std::normal_distribution<double> g;
    for (auto& x : fv) x = g(rng);
    const MatSeq Fv = MatSeq::scalar(fv);
    const Matrix x0 = Matrix::Constant(1, 1, 0.3);
    CHECK(rel_diff(solve_forced({U, Fv, x0}, 60), oracle_forced(U, Fv, x0, 60)) < 1e-13);
    CHECK_THROWS_AS(solve_forced({U, Fv, x0}, 61), std::length_error);
}

TEST_CASE("resolvent examples") {
    const MatSeq Z = solve_resolvent(MatSeq(2, 2, 5), 5);
    CHECK(Z.at(0) == Matrix::Identity(2, 2));
    for (std::size_t n = 1; n <= 5; ++n) CHECK(Z.at(n).isZero());
    std::vector<double> u(20, 0.0);
    u[0] = -0.6;
    const MatSeq G = solve_resolvent(MatSeq::scalar(u), 20);
    for (std::size_t n = 0; n <= 20; ++n) CHECK_THAT(G.entry(n, 0, 0), WithinAbs(std::pow(-0.6, n), 1e-15));
    // lambda1 b(n+1) with b(1) = 0.5, b(2) = 0.25/4
    const MatSeq D = solve_resolvent(MatSeq::scalar({0.5, 0.0625}), 2);
    CHECK(D.entry(1, 0, 0) == 0.5);
    CHECK(D.entry(2, 0, 0) == 0.3125);
    CHECK_THROWS_AS(solve_resolvent(MatSeq::scalar({0.5}), 2), std::length_error);
}

TEST_CASE("variation of constants examples") {
    std::mt19937_64 rng(22);
    const MatSeq U = random_kernel(rng, 2, 30, 0.4);
    const MatSeq Z = solve_resolvent(U, 30);
    Matrix X0(2, 1);
    X0 << 1.0, -2.0;
    const MatSeq X = variation_of_constants(Z, MatSeq(2, 1, 31), X0);
    for (std::size_t n = 0; n <= 30; ++n) CHECK((X.at(n) - Z.at(n) * X0).cwiseAbs().maxCoeff() == 0.0);

    MatSeq f(2, 2, 31);
    f.set(1, Matrix::Identity(2, 2));
    const MatSeq Y = variation_of_constants(Z, f, Matrix::Zero(2, 2));
    for (std::size_t n = 1; n <= 30; ++n) CHECK((Y.at(n) - Z.at(n - 1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(variation_of_constants(Z, MatSeq(3, 1, 31), X0), std::invalid_argument);
}

TEST_CASE("neumann series examples") {
    CHECK(neumann_representation(MatSeq(2, 2, 8), 8) == MatSeq::identity_impulse(2, 9));
    std::vector<double> u(10, 0.0);
    u[0] = 0.7;
    const MatSeq G = neumann_representation(MatSeq::scalar(u), 10);
    for (std::size_t n = 0; n <= 10; ++n) CHECK_THAT(G.entry(n, 0, 0), WithinRel(std::pow(0.7, n), 1e-14));
    std::mt19937_64 rng(23);
    const MatSeq U = random_kernel(rng, 1, 20, 1.0);
    CHECK(rel_diff(neumann_representation(U, 20), solve_resolvent(U, 20)) < 1e-12);
    CHECK_THROWS_AS(neumann_representation(U, 1), std::invalid_argument);
}

TEST_CASE("solver identities on random instances") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> g;
    for (int t = 0; t < 30; ++t) {
        const std::size_t d = 1 + t % 3, n_max = 25 + t;
        const MatSeq U = random_kernel(rng, d, n_max, 0.8);
        const MatSeq Z = solve_resolvent(U, n_max);
        CHECK(rel_diff(neumann_representation(U, n_max), Z) < 1e-12);

        MatSeq f(d, 1, n_max + 1);
        for (std::size_t n = 0; n <= n_max; ++n)
            for (std::size_t p = 0; p < d; ++p) f.entry(n, p, 0) = g(rng);
        Matrix X0(d, 1);
        for (std::size_t p = 0; p < d; ++p) X0(p, 0) = g(rng);
        CHECK(rel_diff(variation_of_constants(Z, f, X0), solve_forced({U, f, X0}, n_max)) < 1e-12);

        // (U * Z)(n) = Z(n+1) = (Z * U)(n)
        const MatSeq UZ = convolve(U, Z), ZU = convolve(Z, U);
        for (std::size_t n = 0; n < n_max; ++n) {
            const double s = std::max(1.0, Z.at(n + 1).cwiseAbs().maxCoeff());
            CHECK((UZ.at(n) - Z.at(n + 1)).cwiseAbs().maxCoeff() <= 1e-12 * s);
            CHECK((ZU.at(n) - Z.at(n + 1)).cwiseAbs().maxCoeff() <= 1e-12 * s);
        }
    }
}

TEST_CASE("nonnegative kernels give nonnegative resolvents") {
    std::mt19937_64 rng(25);
    const MatSeq Z = solve_resolvent(random_kernel(rng, 3, 200, 0.3, true), 200);
    for (std::size_t n = 0; n <= 200; ++n) CHECK(Z.at(n).minCoeff() >= 0.0);
}
