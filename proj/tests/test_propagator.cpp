#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sslab/errors.hpp"
#include "sslab/propagator.hpp"
#include "sslab/renorm_map.hpp"
#include "sslab/string_oracle.hpp"

#include <cmath>
#include <numbers>

using namespace sslab;
using std::numbers::pi;

namespace {

double entries_diff(const PropagatorEntries& e, const Mat2<double>& m)
{
    return max_abs_diff(e.matrix(), m);
}

} // namespace

TEST_CASE("phi at alpha = 1/2 is cos")
{
    const Propagator prop(derive_params(0.5));
    const auto zero = prop.phi(0.0);
    CHECK(zero.a == 1.0);
    CHECK(zero.d == 1.0);
    const auto one = prop.phi(-pi * pi);
    CHECK(one.a == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(one.d == doctest::Approx(-1.0).epsilon(1e-12));
    const auto quarter = prop.phi(-pi * pi / 4.0);
    CHECK(std::abs(quarter.a) < 1e-12);
    CHECK(std::abs(quarter.d) < 1e-12);
    for (int i = 1; i <= 400; ++i) {
        const double l = -0.25 * i;
        const double s = std::sqrt(-l);
        const auto p = prop.phi(l);
        // error is relative to lambda along the curve
        CHECK(std::abs(p.a - std::cos(s)) <= 1e-12 * (1.0 + s));
        CHECK(std::abs(p.d - std::cos(s)) <= 1e-12 * (1.0 + s));
        CHECK_FALSE(p.precision_warning);
    }
}

TEST_CASE("Taylor seed")
{
    for (double a : {0.3, 0.5, 0.7}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        REQUIRE(prop.a_coefficients().size() >= 2);
        CHECK(prop.a_coefficients()[0] == 1.0);
        CHECK(prop.d_coefficients()[0] == 1.0);
        CHECK(prop.a_coefficients()[1] == doctest::Approx(1.0 - params.M).epsilon(1e-14));
        CHECK(prop.d_coefficients()[1] == doctest::Approx(params.M).epsilon(1e-14));
    }
    // at alpha = 1/2 both series are cos(sqrt(-x)) = sum x^j / (2j)!
    const Propagator half(derive_params(0.5));
    double fact = 1.0;
    for (std::size_t j = 0; j < half.a_coefficients().size(); ++j) {
        if (j > 0)
            fact *= static_cast<double>((2 * j - 1) * (2 * j));
        CHECK(half.a_coefficients()[j] == doctest::Approx(1.0 / fact).epsilon(1e-12));
        CHECK(half.d_coefficients()[j] == doctest::Approx(1.0 / fact).epsilon(1e-12));
    }
}

TEST_CASE("entries")
{
    const Propagator half(derive_params(0.5));
    CHECK(entries_diff(half.entries(0.0), Mat2<double>::from(1, 1, 0, 1)) < 1e-15);
    CHECK(entries_diff(half.entries(-pi * pi), Mat2<double>::from(-1, 0, 0, -1)) < 1e-12);
    for (int i = 1; i <= 100; ++i) {
        const double l = -0.5 * i;
        const double s = std::sqrt(-l);
        const auto e = half.entries(l);
        const auto closed = Mat2<double>::from(std::cos(s), std::sin(s) / s, -s * std::sin(s), std::cos(s));
        CHECK(entries_diff(e, closed) <= 1e-11 * (1.0 + s));
    }
}

TEST_CASE("determinant and ratio identities")
{
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0, 0.8}) {
        const Propagator prop(derive_params(a));
        for (int i = 0; i < 100; ++i) {
            const double l = -50.0 * i / 99.0;
            const auto e = prop.entries(l);
            CHECK(std::abs(e.a * e.d - e.b * e.c - 1.0) <= 1e-9);
            CHECK(std::abs(e.a * e.d - l * e.b * e.b - 1.0) <= 1e-9);
            CHECK(std::abs(e.c - l * e.b) <= 1e-9 * (1.0 + std::abs(l * e.b)));
        }
    }
}

TEST_CASE("semiconjugacy on [-50, 0]")
{
    for (double a : {0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        for (int i = 0; i <= 200; ++i) {
            const double l = -0.25 * i;
            const auto p = prop.phi(l);
            const auto q = prop.phi(params.gamma * l);
            const auto fp = f_real({p.a, p.d}, params);
            const double err = std::hypot(fp[0] - q.a, fp[1] - q.d);
            CHECK(err <= 1e-8 * (1.0 + std::hypot(q.a, q.d)));
            CHECK(p.residual <= 1e-8 * (1.0 + std::hypot(p.a, p.d)));
        }
    }
}

TEST_CASE("Herglotz property")
{
    const Propagator prop(derive_params(0.3));
    for (double re : {-40.0, -5.0, 0.0, 2.0})
        for (double im : {0.05, 1.0, 10.0}) {
            const auto e = prop.entries(cplx(re, im));
            CHECK(std::imag(std::conj(e.a) * e.c) > 0.0);
            CHECK(std::abs(e.a * e.d - e.b * e.c - cplx(1.0)) < 1e-9);
        }
}

TEST_CASE("gamma_n")
{
    const auto params = derive_params(0.3);
    const Propagator prop(params);
    for (double l : {-0.7, -3.0, -11.0}) {
        const auto e = prop.entries(l);
        CHECK(max_abs_diff(prop.gamma_n(l, 0), e.matrix()) < 1e-15);
        // Gamma_<1> from two copies of Gamma glued across the scaling point
        const auto glued = D(params.delta) * e.matrix() * D(1.0 / params.delta) * e.matrix();
        const auto g1 = prop.gamma_n(l, 1);
        CHECK(max_abs_diff(g1, glued) <= 1e-8 * (1.0 + max_abs(g1)));
        // in gaps the entries grow like exp(2^n zeta), and ad - bc cancels
        for (int n = 0; n < 6; ++n) {
            const auto g = prop.gamma_n(l, n);
            CHECK(std::abs(g.det() - 1.0) <= 1e-9 * std::max(1.0, 1e-4 * max_abs(g) * max_abs(g)));
        }
    }
    const Propagator half(derive_params(0.5));
    const double l = -pi * pi;
    const auto g = half.gamma_n(l, 1);
    const double s = 2.0 * pi;
    CHECK(max_abs_diff(g, Mat2<double>::from(std::cos(s), std::sin(s) / pi, -pi * std::sin(s), std::cos(s))) < 1e-10);
}

TEST_CASE("gamma_n against the string oracle on I_<n>")
{
    const auto params = derive_params(0.6);
    const Propagator prop(params);
    for (std::size_t n : {1u, 2u, 3u}) {
        const auto s = discretize(params, BlowupPrefix::all_ones(n), static_cast<int>(n) + 12, MassScheme::Barycenter);
        for (double l : {-0.5, -4.0}) {
            const auto oracle = propagate(s, l);
            const auto g = prop.gamma_n(l, static_cast<int>(n));
            CHECK(max_abs_diff(oracle, g) <= 1e-4 * (1.0 + max_abs(g)));
        }
    }
}

TEST_CASE("trace products and the normalized propagator")
{
    for (double a : {0.3, 0.6}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        const double sd = std::sqrt(params.delta);
        CHECK(prop.trace_product(-2.0, 0).value == 1.0);
        for (int n = 0; n <= 6; ++n)
            CHECK(prop.trace_product(0.0, n).value == doctest::Approx(std::pow(sd + 1.0 / sd, n)).epsilon(1e-13));
        for (double l : {-0.3, -2.0, -9.0})
            for (int n = 0; n <= 6; ++n) {
                const auto t = prop.tilde_gamma(l, n);
                const auto c = prop.tilde_gamma_by_conjugation(l, n);
                CHECK(std::abs(t.det() - 1.0) <= 1e-9 * std::max(1.0, 1e-4 * max_abs(t) * max_abs(t)));
                CHECK(max_abs_diff(t, c) <= 1e-8 * (1.0 + max_abs(t)));
                const auto o = prop.phi_orbit(l, n + 1).back();
                CHECK(t.trace() == doctest::Approx(sd * o[0] + o[1] / sd).epsilon(1e-10));
            }
    }
}

TEST_CASE("orbit of D through gamma_n at lambda_1")
{
    // t(lambda_1 / gamma) = 0 puts phi(lambda_1 / gamma) on D; the propagator at
    // gamma^n lambda_1 is then diagonal with entries delta^(-+2^n).
    const auto params = derive_params(2.0 / 3.0);
    const Propagator prop(params);
    double lo = -20.0, hi = -1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((prop.t_value(mid / params.gamma) > 0.0) == (prop.t_value(lo / params.gamma) > 0.0))
            lo = mid;
        else
            hi = mid;
    }
    const double l1 = 0.5 * (lo + hi);
    for (int n = 1; n <= 4; ++n) {
        const auto g = prop.gamma_n(l1, n);
        const double e = std::pow(params.delta, std::ldexp(1.0, n));
        CHECK(g(0, 0) == doctest::Approx(1.0 / e).epsilon(1e-7));
        CHECK(g(1, 1) == doctest::Approx(e).epsilon(1e-7));
        CHECK(std::abs(g(0, 1)) <= 1e-7 * e);
        CHECK(std::abs(g(1, 0)) <= 1e-7 * e);
    }
}

TEST_CASE("oracle agreement improves with the level")
{
    // Midpoint masses converge at a slower rate on the singular measure than
    // barycentric ones; both are pinned here.
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        std::vector<double> mid_err, bary_err;
        for (int level : {8, 10, 12, 14}) {
            const auto sm = discretize(params, BlowupPrefix{}, level, MassScheme::Midpoint);
            const auto sb = discretize(params, BlowupPrefix{}, level, MassScheme::Barycenter);
            double em = 0.0, eb = 0.0;
            for (int i = 0; i < 50; ++i) {
                const double l = -40.0 * i / 49.0;
                const auto e = prop.entries(l).matrix();
                em = std::max(em, max_abs_diff(e, propagate(sm, l)));
                eb = std::max(eb, max_abs_diff(e, propagate(sb, l)));
            }
            mid_err.push_back(em);
            bary_err.push_back(eb);
        }
        for (std::size_t k = 1; k < mid_err.size(); ++k) {
            CHECK(mid_err[k] < mid_err[k - 1]);
            CHECK(bary_err[k] < bary_err[k - 1]);
        }
        CHECK(mid_err.back() <= 4e-4);
        CHECK(bary_err.back() <= 1e-4);
    }
}

TEST_CASE("construction checks")
{
    PropagatorOptions bad;
    bad.taylor_order = 0;
    CHECK_THROWS(Propagator(derive_params(0.4), bad));
    ModelParams broken = derive_params(0.4);
    broken.delta *= 1.001;
    CHECK_THROWS_AS(Propagator{broken}, DomainError);
}
