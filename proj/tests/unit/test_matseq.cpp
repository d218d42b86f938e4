#include "catch_amalgamated.hpp"

#include "pervolt/matseq.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>

using namespace pervolt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MatSeq random_seq(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t len, double lo = -1.0,
                  double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    MatSeq S(rows, cols, len);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t p = 0; p < rows; ++p)
            for (std::size_t q = 0; q < cols; ++q) S.entry(n, p, q) = u(rng);
    return S;
}

// index-by-index triple loop
MatSeq brute_convolve(const MatSeq& U, const MatSeq& V) {
    const std::size_t len = std::min(U.len(), V.len());
    MatSeq W(U.rows(), V.cols(), len);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t p = 0; p < U.rows(); ++p)
            for (std::size_t q = 0; q < V.cols(); ++q) {
                long double acc = 0;
                for (std::size_t j = 0; j <= n; ++j)
                    for (std::size_t k = 0; k < U.cols(); ++k) acc += (long double)U.entry(n - j, p, k) * V.entry(j, k, q);
                W.entry(n, p, q) = static_cast<double>(acc);
            }
    return W;
}

double max_diff(const MatSeq& a, const MatSeq& b) {
    REQUIRE(a.len() == b.len());
    double m = 0;
    for (std::size_t n = 0; n < a.len(); ++n) m = std::max(m, (a.at(n) - b.at(n)).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

TEST_CASE("convolve small scalar example") {
    const MatSeq W = convolve(MatSeq::scalar({1, 2, 3}), MatSeq::scalar({4, 5, 6}));
    REQUIRE(W.len() == 3);
    CHECK(W.entry(0, 0, 0) == 4);
    CHECK(W.entry(1, 0, 0) == 13);
    CHECK(W.entry(2, 0, 0) == 28);
}

TEST_CASE("convolve with the identity impulse truncates U") {
    std::mt19937_64 rng(1);
    const MatSeq U = random_seq(rng, 3, 3, 5);
    const MatSeq W = convolve(U, MatSeq::identity_impulse(3, 3));
    CHECK(W == U.prefix(3));
}

TEST_CASE("convolve matches the brute force oracle") {
    std::mt19937_64 rng(2);
    const MatSeq U = random_seq(rng, 3, 3, 8), V = random_seq(rng, 3, 3, 8);
    CHECK(max_diff(convolve(U, V), brute_convolve(U, V)) < 1e-13);
    CHECK(max_diff(convolve_reference(U, V), brute_convolve(U, V)) < 1e-13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + trial % 4, len = 10 + 7 * trial;
        const MatSeq A = random_seq(rng, d, d, len), B = random_seq(rng, d, 2, len + 3);
        const MatSeq fast = convolve(A, B), ref = convolve_reference(A, B);
        CHECK(fast.len() == len);
        CHECK(max_diff(fast, ref) <= 1e-13 * std::max(1.0, ref.max_abs()));
    }
}

TEST_CASE("convolve algebra") {
    std::mt19937_64 rng(3);
    const MatSeq A = random_seq(rng, 2, 2, 30), B = random_seq(rng, 2, 2, 30), C = random_seq(rng, 2, 2, 30);
    const MatSeq l = convolve(convolve(A, B), C), r = convolve(A, convolve(B, C));
    CHECK(max_diff(l, r) <= 1e-12 * l.max_abs());
    const MatSeq dist = convolve(A, B + C), sep = convolve(A, B) + convolve(A, C);
    CHECK(max_diff(dist, sep) <= 1e-12 * dist.max_abs());
    const MatSeq a = random_seq(rng, 1, 1, 40), b = random_seq(rng, 1, 1, 25);
    CHECK(max_diff(convolve(a, b), convolve(b, a)) <= 1e-12 * convolve(a, b).max_abs());
    CHECK(convolve(a, b).len() == 25);
}

TEST_CASE("convolve rejects mismatched shapes") {
    CHECK_THROWS_AS(convolve(MatSeq(2, 2, 3), MatSeq(3, 1, 3)), std::invalid_argument);
}

TEST_CASE("jfold") {
    const MatSeq J = jfold(MatSeq::scalar({1, 1, 1, 1}), 2);
    CHECK(J.entry(0, 0, 0) == 1);
    CHECK(J.entry(1, 0, 0) == 2);
    CHECK(J.entry(2, 0, 0) == 3);
    CHECK(J.entry(3, 0, 0) == 4);
    CHECK_THROWS_AS(jfold(MatSeq::scalar({1, 1}), 1), std::invalid_argument);
    const MatSeq I = MatSeq::identity_impulse(2, 6);
    CHECK(jfold(I, 4) == I);
    std::mt19937_64 rng(4);
    const MatSeq U = random_seq(rng, 2, 2, 20);
    const MatSeq U2 = jfold(U, 2);
    CHECK(max_diff(convolve(U2, U), convolve(U, U2)) <= 1e-12 * U2.max_abs() * 20);
    CHECK(max_diff(jfold(U, 3), convolve(U2, U)) == 0.0);
}

TEST_CASE("ztransform") {
    std::vector<double> ones(50, 1.0);
    const ZTransform z1 = ztransform(MatSeq::scalar(ones), 2.0);
    CHECK_THAT(z1.value(0, 0), WithinRel(2.0 * (1.0 - std::pow(2.0, -50)), 1e-15));
    CHECK_THAT(z1.last_term, WithinRel(std::pow(2.0, -49), 1e-12));

    Matrix A(2, 2);
    A << 1, 2, 3, 4;
    CHECK(ztransform(MatSeq::from_matrices({A}), 0.3).value == A);

    std::vector<double> half(60);
    for (std::size_t n = 0; n < 60; ++n) half[n] = std::pow(0.5, n);
    CHECK_THAT(ztransform(MatSeq::scalar(half), 1.0).value(0, 0), WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(ztransform(MatSeq::scalar(half), 0.0), std::domain_error);

    std::mt19937_64 rng(5);
    const MatSeq U = random_seq(rng, 2, 2, 30), V = random_seq(rng, 2, 2, 30);
    const Matrix lhs = ztransform(2.5 * U + V, 1.3).value;
    const Matrix rhs = 2.5 * ztransform(U, 1.3).value + ztransform(V, 1.3).value;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inf_norm") {
    CHECK(inf_norm(Matrix::Identity(3, 3)) == 1.0);
    Matrix A(2, 2);
    A << 1, -2, 3, 4;
    CHECK(inf_norm(A) == 7.0);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        Matrix M(4, 5), N(5, 3);
        for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < N.size(); ++i) N.data()[i] = g(rng);
        double oracle = 0;
        for (int p = 0; p < 4; ++p) {
            double s = 0;
            for (int q = 0; q < 5; ++q) s += std::abs(M(p, q));
            oracle = std::max(oracle, s);
        }
        CHECK_THAT(inf_norm(M), WithinRel(oracle, 1e-14));
        CHECK(inf_norm(M * N) <= inf_norm(M) * inf_norm(N) * (1 + 1e-15));
    }
}

TEST_CASE("spectral radius") {
    Matrix nil(2, 2);
    nil << 0, 1, 0, 0;
    CHECK_THAT(spectral_radius(nil), WithinAbs(0.0, 1e-8));
    Matrix dg = Matrix::Zero(2, 2);
    dg(0, 0) = 2;
    dg(1, 1) = 3;
    CHECK_THAT(spectral_radius(dg), WithinAbs(3.0, 1e-8));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int t = 0; t < 100; ++t) {
        Matrix M(2, 2);
        M << u(rng), u(rng), u(rng), u(rng);
        // quadratic formula
        const double tr = M.trace(), det = M.determinant();
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det));
        const double oracle = std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
        const SpectralRadiusTrace tr_ = spectral_radius_trace(M);
        CHECK_THAT(tr_.estimate, WithinAbs(oracle, 1e-8 * std::max(1.0, oracle)));
        for (double b : tr_.bounds) CHECK(b >= oracle * (1 - 1e-12));
    }
}

TEST_CASE("spectral radius is monotone on nonnegative matrices") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 50; ++t) {
        Matrix A(4, 4), B(4, 4);
        for (int i = 0; i < 16; ++i) {
            A.data()[i] = u(rng);
            B.data()[i] = A.data()[i] + u(rng) * (t % 2);
        }
        CHECK(spectral_radius(A) <= spectral_radius(B) + 2e-8);
    }
}

TEST_CASE("indexing contract") {
    MatSeq S(2, 2, 3);
    CHECK_THROWS_AS(S.at(3), std::out_of_range);
    CHECK_THROWS_AS(S.prefix(4), std::length_error);
    CHECK(S.prefix(2).len() == 2);
}
