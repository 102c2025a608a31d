#include <doctest.h>

#include <cmath>

#include "spar/error.hpp"
#include "spar/numeric.hpp"
#include "test_support.hpp"

using namespace spar;
using spar::test::max_abs_diff;
using spar::test::random_matrix;
using spar::test::random_vector;

namespace {

Vector ridge_primal(const Matrix& X, const Vector& y, double lambda)
{
    const Matrix A = X.transpose() * X + lambda * Matrix::Identity(X.cols(), X.cols());
    return A.ldlt().solve(X.transpose() * y);
}

Dataset make_dataset(Matrix X, Vector y)
{
    Dataset d;
    d.X = std::move(X);
    d.y = std::move(y);
    return d;
}

} // namespace

TEST_CASE("standardize: symmetric three-point column")
{
    Matrix X(3, 1);
    X << 1, 2, 3;
    Vector y(3);
    y << 2, 4, 6;
    const auto [s, st] = standardize(make_dataset(X, y));
    CHECK(s.X(0, 0) == doctest::Approx(-1.0));
    CHECK(s.X(1, 0) == doctest::Approx(0.0));
    CHECK(s.X(2, 0) == doctest::Approx(1.0));
    CHECK(s.y(0) == doctest::Approx(-1.0));
    CHECK(s.y(2) == doctest::Approx(1.0));
    CHECK(st.x_scale(0) == doctest::Approx(1.0));
    CHECK(st.y_scale == doctest::Approx(2.0));
}

TEST_CASE("standardize: constant column becomes zero with scale 1")
{
    Matrix X(3, 2);
    X << 5, 1, 5, 2, 5, 4;
    Vector y(3);
    y << 1, 0, 2;
    const auto [s, st] = standardize(make_dataset(X, y));
    CHECK(s.X.col(0).isZero(0.0));
    REQUIRE(st.constant_columns.size() == 1);
    CHECK(st.constant_columns[0] == 0);
    CHECK(st.x_scale(0) == 1.0);
}

TEST_CASE("standardize: moments of a random 10x4 matrix")
{
    Rng rng(7);
    const Matrix X = (random_matrix(10, 4, rng).array() * 3.0 + 2.0).matrix();
    const auto [s, st] = standardize(make_dataset(X, random_vector(10, rng)));
    for (Index j = 0; j < 4; ++j) {
        const double mean = s.X.col(j).mean();
        const double sd = std::sqrt((s.X.col(j).array() - mean).square().sum() / 9.0);
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(sd - 1.0) < 1e-12);
    }
    CHECK(std::abs(s.y.mean()) < 1e-12);
}

TEST_CASE("standardize then restore is the identity")
{
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix X = random_matrix(12, 6, rng) * 10.0;
        X.col(2).setConstant(-4.0);
        const Vector y = random_vector(12, rng).array() * 5.0 + 100.0;
        const Dataset d = make_dataset(X, y);
        const auto [s, st] = standardize(d);
        const Dataset back = st.restore(s);
        CHECK(max_abs_diff(back.X, X) <= 1e-10 * X.cwiseAbs().maxCoeff());
        CHECK(max_abs_diff(back.y, y) <= 1e-10 * y.cwiseAbs().maxCoeff());
        CHECK(max_abs_diff(st.transform_x(X), s.X) < 1e-12);
    }
}

TEST_CASE("standardize rejects a constant response")
{
    Rng rng(1);
    const Dataset d = make_dataset(random_matrix(5, 2, rng), Vector::Constant(5, 3.0));
    try {
        standardize(d);
        FAIL("expected ZeroVarianceResponse");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroVarianceResponse);
    }
}

TEST_CASE("coefficient back-transform reproduces standardized predictions")
{
    Rng rng(11);
    Matrix X = random_matrix(15, 5, rng) * 4.0;
    X.col(1).setConstant(2.0);
    const Vector y = random_vector(15, rng).array() * 3.0 + 7.0;
    const auto [s, st] = standardize(make_dataset(X, y));
    Vector beta_std = random_vector(5, rng);
    const Vector beta = st.coefficients_to_original(beta_std);
    CHECK(beta(1) == 0.0);
    const double intercept = st.intercept_for(beta);
    const Vector direct = (X * beta).array() + intercept;
    const Vector via_std = (s.X * beta_std).array() * st.y_scale + st.y_center;
    CHECK(max_abs_diff(direct, via_std) < 1e-10);
}

TEST_CASE("ridge_dual: identity design")
{
    const Matrix X = Matrix::Identity(2, 2);
    Vector y(2);
    y << 2, 4;
    const Vector b = ridge_dual(X, y, 1.0);
    CHECK(b(0) == doctest::Approx(1.0));
    CHECK(b(1) == doctest::Approx(2.0));
}

TEST_CASE("ridge_dual matches the primal form")
{
    Rng rng(5);
    {
        const Matrix X = random_matrix(5, 20, rng);
        const Vector y = random_vector(5, rng);
        CHECK(max_abs_diff(ridge_dual(X, y, 0.7), ridge_primal(X, y, 0.7)) < 1e-8);
    }
    std::uniform_int_distribution<Index> dim(1, 30);
    for (int rep = 0; rep < 50; ++rep) {
        const Index n = dim(rng), p = dim(rng);
        const Matrix X = random_matrix(n, p, rng);
        const Vector y = random_vector(n, rng);
        for (double lambda : {0.1, 1.0, 10.0}) CHECK(max_abs_diff(ridge_dual(X, y, lambda), ridge_primal(X, y, lambda)) < 1e-8);
    }
}

TEST_CASE("ridge_dual limits")
{
    Rng rng(9);
    const Matrix X = random_matrix(6, 25, rng);
    const Vector y = random_vector(6, rng);
    CHECK((ridge_dual(X, y, 1e-6) - holp(X, y)).norm() < 1e-4);
    const Vector xty = X.transpose() * y;
    CHECK((1e8 * ridge_dual(X, y, 1e8) - xty).norm() < 1e-4 * xty.norm());
}

TEST_CASE("ridge_dual rejects a non-positive penalty")
{
    const Matrix X = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(ridge_dual(X, Vector::Ones(2), 0.0), Error);
}

TEST_CASE("holp: diagonal toy against the pseudo-inverse")
{
    Matrix X(2, 3);
    X << 1, 0, 0, 0, 2, 0;
    Vector y(2);
    y << 1, 4;
    const Vector b = holp(X, y);
    CHECK(b(0) == doctest::Approx(1.0));
    CHECK(b(1) == doctest::Approx(2.0));
    CHECK(b(2) == doctest::Approx(0.0));
    CHECK(max_abs_diff(b, spar::test::pinv(X) * y) < 1e-12);
}

TEST_CASE("holp: square invertible design solves exactly")
{
    Rng rng(2);
    const Matrix X = random_matrix(6, 6, rng) + 6.0 * Matrix::Identity(6, 6);
    const Vector y = random_vector(6, rng);
    CHECK(max_abs_diff(holp(X, y), X.lu().solve(y)) < 1e-10);
}

TEST_CASE("holp is the minimum-norm interpolant")
{
    Rng rng(13);
    const Matrix X = random_matrix(8, 40, rng);
    const Vector y = random_vector(8, rng);
    const Vector b = holp(X, y);
    CHECK((X * b - y).norm() < 1e-8);
    const Matrix P = X.transpose() * (X * X.transpose()).ldlt().solve(X); // row-space projector
    for (int rep = 0; rep < 100; ++rep) {
        const Vector r = random_vector(40, rng);
        const Vector v = r - P * r; // null-space direction
        const Vector other = b + v;
        CHECK((X * other - y).norm() < 1e-8);
        CHECK(b.squaredNorm() < other.squaredNorm());
        CHECK(other.squaredNorm() - b.squaredNorm() == doctest::Approx(v.squaredNorm()).epsilon(1e-8));
    }
}

TEST_CASE("holp with jitter is the ridge dual")
{
    Rng rng(4);
    const Matrix X = random_matrix(5, 12, rng);
    const Vector y = random_vector(5, rng);
    CHECK(max_abs_diff(holp(X, y, 0.3), ridge_dual(X, y, 0.3)) < 1e-12);
}

TEST_CASE("holp on a rank-deficient Gram takes the tiny-ridge rung")
{
    Rng rng(6);
    Matrix X = random_matrix(4, 10, rng);
    X.row(3) = X.row(0);
    Vector y = random_vector(4, rng);
    y(3) = y(0); // consistent system
    const Vector b = holp(X, y);
    CHECK((X * b - y).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(max_abs_diff(b, spar::test::pinv(X) * y) < 1e-5);
}

TEST_CASE("holp on a zero Gram throws SingularGram and the fallback recovers")
{
    const Matrix X = Matrix::Zero(3, 6);
    const Vector y = Vector::Ones(3);
    try {
        holp(X, y);
        FAIL("expected SingularGram");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularGram);
    }
    const Vector b = with_jitter_fallback([&](double j) { return holp(X, y, j); }, 0.01);
    CHECK(b.isZero());
}

TEST_CASE("solve_spd: tiny ridge rescues a nearly singular system")
{
    Matrix A(2, 2);
    A << 1, 1, 1, 1 + 1e-15;
    const Matrix x = solve_spd(A, Matrix::Ones(2, 1), 0.0);
    CHECK(x.allFinite());
    CHECK((A * x - Matrix::Ones(2, 1)).norm() < 1e-6);
}

TEST_CASE("ols_reduced basics")
{
    SUBCASE("orthonormal columns give Z'y")
    {
        Rng rng(8);
        const Matrix Q = random_matrix(10, 3, rng).householderQr().householderQ() * Matrix::Identity(10, 3);
        const Vector y = random_vector(10, rng);
        CHECK(max_abs_diff(ols_reduced(Q, y), Q.transpose() * y) < 1e-12);
    }
    SUBCASE("single column of ones gives the mean")
    {
        const Matrix Z = Matrix::Ones(4, 1);
        Vector y(4);
        y << 1, 2, 3, 4;
        CHECK(ols_reduced(Z, y)(0) == doctest::Approx(2.5));
    }
    SUBCASE("normal equations hold")
    {
        Rng rng(10);
        const Matrix Z = random_matrix(30, 5, rng);
        const Vector y = random_vector(30, rng);
        const Vector g = ols_reduced(Z, y);
        CHECK((Z.transpose() * (y - Z * g)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("jitter solves the regularized system")
    {
        Rng rng(12);
        const Matrix Z = random_matrix(20, 4, rng);
        const Vector y = random_vector(20, rng);
        const Matrix A = Z.transpose() * Z + 0.5 * Matrix::Identity(4, 4);
        CHECK(max_abs_diff(ols_reduced(Z, y, 0.5), A.ldlt().solve(Z.transpose() * y)) < 1e-12);
    }
    SUBCASE("collinear columns: tiny ridge gives the minimum-norm solution")
    {
        Matrix Z(6, 2);
        Z.col(0) = Vector::LinSpaced(6, 1, 6);
        Z.col(1) = 2.0 * Z.col(0);
        const Vector y = Vector::LinSpaced(6, 0, 5);
        CHECK(max_abs_diff(ols_reduced(Z, y), spar::test::pinv(Z) * y) < 1e-6);
    }
    SUBCASE("all-zero Z throws SingularGram")
    {
        CHECK_THROWS_AS(ols_reduced(Matrix::Zero(5, 2), Vector::Ones(5)), Error);
    }
}

TEST_CASE("dataset validation")
{
    Dataset d;
    d.X = Matrix::Zero(3, 2);
    d.y = Vector::Zero(2);
    CHECK_THROWS_AS(d.validate(), Error);
    d.y = Vector::Zero(3);
    d.truth = Truth{Vector::Zero(2), 0.0, 1.0, {}};
    CHECK_NOTHROW(d.validate());
    d.truth->beta(1) = 2.0;
    CHECK_THROWS_AS(d.validate(), Error);
    d.truth->active_set = {1};
    CHECK_NOTHROW(d.validate());
    const Dataset sub = d.subset_rows({2, 0});
    CHECK(sub.n() == 2);
    CHECK(sub.truth.has_value());
}
