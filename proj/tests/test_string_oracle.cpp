#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sslab/errors.hpp"
#include "sslab/string_oracle.hpp"

#include <cmath>
#include <numbers>

using namespace sslab;
using std::numbers::pi;

TEST_CASE("discretize")
{
    const auto half = discretize(derive_params(0.5), BlowupPrefix{}, 1);
    REQUIRE(half.size() == 2);
    CHECK(half.positions[0] == doctest::Approx(0.25));
    CHECK(half.positions[1] == doctest::Approx(0.75));
    CHECK(half.masses[0] == doctest::Approx(0.5));
    CHECK(half.masses[1] == doctest::Approx(0.5));

    const auto third = discretize(derive_params(1.0 / 3.0), BlowupPrefix{}, 1);
    REQUIRE(third.size() == 2);
    CHECK(third.positions[0] == doctest::Approx(1.0 / 6.0));
    CHECK(third.positions[1] == doctest::Approx(2.0 / 3.0));
    CHECK(third.masses[0] == doctest::Approx(2.0 / 3.0));
    CHECK(third.masses[1] == doctest::Approx(1.0 / 3.0));

    const auto single = discretize(derive_params(0.3), BlowupPrefix{}, 0);
    REQUIRE(single.size() == 1);
    CHECK(single.masses[0] == 1.0);
    CHECK(single.positions[0] == 0.5);

    const auto p = derive_params(0.3);
    const auto s = discretize(p, BlowupPrefix::parse("1221"), 10);
    CHECK(s.size() == 1024);
    const double expected = cell_mass(p, BlowupPrefix::parse("1221"), CellAddress{4, {}});
    CHECK(std::abs(s.total_mass() - expected) <= 1e-12 * expected);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.positions[i] > s.left);
        CHECK(s.positions[i] < s.right);
        if (i > 0)
            CHECK(s.positions[i] > s.positions[i - 1]);
    }
    CHECK_THROWS_AS(discretize(p, BlowupPrefix{}, -1), DomainError);
}

TEST_CASE("barycenter scheme reproduces the first moment")
{
    const auto p = derive_params(0.3);
    const auto s = discretize(p, BlowupPrefix{}, 0, MassScheme::Barycenter);
    CHECK(s.positions[0] == doctest::Approx(p.M));
}

TEST_CASE("propagate")
{
    const auto s = discretize(derive_params(0.4), BlowupPrefix{}, 6);
    const auto free = propagate(s, 0.0, 0.1, 0.8);
    CHECK(max_abs_diff(free, Mat2<double>::from(1, 0.7, 0, 1)) < 1e-14);

    DiscreteString one;
    one.positions = {0.5};
    one.masses = {1.0};
    for (double l : {-3.0, -0.5, 2.0}) {
        const auto m = propagate(one, l);
        CHECK(max_abs_diff(m, Mat2<double>::from(1 + l / 2, 1 + l / 4, l, 1 + l / 2)) < 1e-14);
    }

    // composition over a split point
    const double l = -17.0;
    const auto whole = propagate(s, l, 0.0, 1.0);
    const auto split = propagate(s, l, 0.37, 1.0) * propagate(s, l, 0.0, 0.37);
    CHECK(max_abs_diff(whole, split) < 1e-12 * max_abs(whole));
}

TEST_CASE("unimodularity up to 2^16 masses")
{
    const auto s = discretize(derive_params(2.0 / 3.0), BlowupPrefix{}, 16);
    for (double l : {-1e4, -300.0, -1.0, 0.0, 5.0}) {
        const auto m = propagate(s, l);
        CHECK(std::abs(m.det() - 1.0) <= 1e-10 * std::max(1.0, max_abs(m) * max_abs(m) * 1e-6));
    }
    const auto c = propagate(s, cplx(-50.0, 3.0));
    CHECK(std::abs(c.det() - cplx(1.0)) <= 1e-10);
}

TEST_CASE("Herglotz sign")
{
    const auto s = discretize(derive_params(0.3), BlowupPrefix{}, 10);
    for (double re : {-80.0, -10.0, -1.0, 0.0, 3.0})
        for (double im : {0.01, 1.0, 30.0}) {
            const auto m = propagate(s, cplx(re, im));
            CHECK(std::imag(std::conj(m(0, 0)) * m(1, 0)) > 0.0);
        }
}

TEST_CASE("small operators by hand")
{
    const auto s = discretize(derive_params(0.5), BlowupPrefix{}, 1);
    const auto neu = build_operator(s, Boundary::Neumann);
    const auto nv = eigen_solve(neu, -100.0, 1.0).values;
    REQUIRE(nv.size() == 2);
    CHECK(nv[0] == doctest::Approx(-8.0).epsilon(1e-10));
    CHECK(std::abs(nv[1]) < 1e-10);
    CHECK(eigen_count(neu, -1.0) == 1);

    const auto dir = build_operator(s, Boundary::Dirichlet);
    const auto dv = eigen_solve(dir, -100.0, 0.0).values;
    REQUIRE(dv.size() == 2);
    CHECK(dv[0] == doctest::Approx(-16.0).epsilon(1e-10));
    CHECK(dv[1] == doctest::Approx(-8.0).epsilon(1e-10));
}

TEST_CASE("Neumann kernel and symmetry")
{
    const auto s = discretize(derive_params(0.35), BlowupPrefix::parse("12"), 8);
    const TridiagonalOperator op(s, Boundary::Neumann);
    const auto af = op.apply(std::vector<double>(s.size(), 1.0));
    for (double v : af)
        CHECK(std::abs(v) < 1e-8 * op.norm_inf());
    for (std::size_t i = 0; i + 1 < op.size(); ++i)
        CHECK(op.off_diagonal()[i] >= 0.0);
    const auto [lo, hi] = op.gershgorin();
    CHECK(eigen_count(op, lo - 1.0) == 0);
    CHECK(eigen_count(op, hi + 1.0) == op.size());
}

TEST_CASE("eigen_count is monotone and additive")
{
    const auto s = discretize(derive_params(0.6), BlowupPrefix{}, 9);
    const TridiagonalOperator op(s, Boundary::Dirichlet);
    std::size_t prev = 0;
    for (int i = 0; i <= 200; ++i) {
        const double x = -2e5 + 1e3 * i;
        const auto c = eigen_count(op, x);
        CHECK(c >= prev);
        prev = c;
    }
    const auto a = eigen_count(op, -5000.0), b = eigen_count(op, -500.0), c = eigen_count(op, -50.0);
    CHECK((b - a) + (c - b) == c - a);
}

TEST_CASE("inertia jitter on an exact eigenvalue")
{
    const auto s = discretize(derive_params(0.5), BlowupPrefix{}, 1);
    const TridiagonalOperator op(s, Boundary::Neumann);
    const auto d = eigen_count_detail(op, -8.0);
    CHECK(d.count <= 1);
    CHECK(d.lambda_used != 0.0);
}

TEST_CASE("level-10 regressions at alpha = 1/2")
{
    const auto s = discretize(derive_params(0.5), BlowupPrefix{}, 10);
    const auto neu = eigen_solve(build_operator(s, Boundary::Neumann), -15.0, -5.0).values;
    REQUIRE(neu.size() == 1);
    CHECK(std::abs(neu[0] + pi * pi) <= 0.05);

    const auto dir = eigen_solve(build_operator(s, Boundary::Dirichlet), -15.0, 0.0).values;
    REQUIRE(dir.size() == 1);
    CHECK(std::abs(dir[0] + pi * pi) <= 0.05);

    const auto zero = eigen_solve(build_operator(s, Boundary::Neumann), -1.0, 1.0).values;
    REQUIRE(zero.size() == 1);
    CHECK(std::abs(zero[0]) < 1e-9);
}

TEST_CASE("eigenvectors are mass-orthonormal")
{
    const auto s = discretize(derive_params(0.3), BlowupPrefix{}, 7);
    const TridiagonalOperator op(s, Boundary::Neumann);
    EigenSolveOptions o;
    o.vectors = true;
    const auto r = eigen_solve(op, -2000.0, 1.0, o);
    CHECK(r.all_converged());
    REQUIRE(r.vectors.size() >= 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double ip = mass_inner(s.masses, r.vectors[i], r.vectors[j]);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
    for (std::size_t i = 0; i < r.vectors.size(); ++i) {
        const auto af = op.apply(r.vectors[i]);
        double err = 0.0;
        for (std::size_t k = 0; k < af.size(); ++k)
            err = std::max(err, std::abs(af[k] - r.values[i] * r.vectors[i][k]));
        CHECK(err <= 1e-7 * op.norm_inf());
    }
}
