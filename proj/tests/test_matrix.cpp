#include "doctest.h"

#include <random>

#include "llrk/matrix.hpp"
#include "oracles.hpp"

using namespace llrk;

TEST_CASE("dense matrix basics") {
    DenseMatrix m(2, 3);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(!m.square());
    m(1, 2) = 4.0;
    CHECK(m.norm_inf() == doctest::Approx(4.0));
    CHECK(m.max_abs() == doctest::Approx(4.0));

    const DenseMatrix id = DenseMatrix::identity(3);
    const DenseMatrix prod = m * id;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(prod(i, j) == m(i, j));
}

TEST_CASE("infinity norm is max absolute row sum") {
    const DenseMatrix m(2, 2, {1.0, -2.0, 3.0, 4.0});
    CHECK(m.norm_inf() == doctest::Approx(7.0));
    const Vector v{-3.0, 2.0};
    CHECK(norm_inf(v) == doctest::Approx(3.0));
}

TEST_CASE("solve_linear: identity returns rhs") {
    const DenseMatrix a = DenseMatrix::identity(3);
    DenseMatrix b(3, 2, {1, 2, 3, 4, 5, 6});
    const DenseMatrix x = solve_linear(a, b);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(x(i, j) == b(i, j));
}

TEST_CASE("solve_linear: diagonal inverse") {
    const Vector d{2.0, 4.0};
    const DenseMatrix a = DenseMatrix::diagonal(d);
    const DenseMatrix x = solve_linear(a, DenseMatrix::identity(2));
    CHECK(x(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(x(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(x(0, 1) == 0.0);
    CHECK(x(1, 0) == 0.0);
}

TEST_CASE("solve_linear: residual on random well-conditioned 5x5") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix a(5, 5);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) a(i, j) = oracles::uniform(rng, -1.0, 1.0);
            a(i, i) += 5.0; // diagonally dominant
        }
        DenseMatrix b(5, 3);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 3; ++j) b(i, j) = oracles::uniform(rng, -1.0, 1.0);
        const DenseMatrix x = solve_linear(a, b);
        const DenseMatrix r = a * x - b;
        CHECK(r.norm_inf() <= 1e-12 * a.norm_inf() * std::max(x.norm_inf(), 1.0));
    }
}

TEST_CASE("solve_linear: zero pivot raises SingularMatrix") {
    const DenseMatrix a(2, 2, {1.0, 2.0, 2.0, 4.0});
    CHECK_THROWS_AS(solve_linear(a, DenseMatrix::identity(2)), SingularMatrix);
    const DenseMatrix zero(3, 3);
    CHECK_THROWS_AS(solve_linear(zero, DenseMatrix::identity(3)), SingularMatrix);
}

TEST_CASE("solve_linear: shape checks") {
    const DenseMatrix a(2, 3);
    CHECK_THROWS_AS(solve_linear(a, DenseMatrix::identity(2)), Error);
    const DenseMatrix sq = DenseMatrix::identity(2);
    CHECK_THROWS_AS(solve_linear(sq, DenseMatrix(3, 1)), Error);
}

TEST_CASE("LU rcond estimate detects near-singularity") {
    DenseMatrix good = DenseMatrix::identity(4);
    CHECK(LuFactor(good).rcond_estimate() == doctest::Approx(1.0));
    DenseMatrix skewed = DenseMatrix::diagonal(Vector{1.0, 1e-10});
    CHECK(LuFactor(skewed, 0.0).rcond_estimate() == doctest::Approx(1e-10));
}
