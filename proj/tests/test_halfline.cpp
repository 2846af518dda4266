#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sslab/errors.hpp"
#include "sslab/halfline.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sslab;
using std::numbers::pi;

TEST_CASE("extension coefficients")
{
    const auto two = derive_params(2.0 / 3.0);
    const auto bn = extension_coeffs(Boundary::Neumann, 3, two);
    CHECK(bn[0].value() == doctest::Approx(-0.5));
    CHECK(bn[1].value() == doctest::Approx(0.25));
    CHECK(bn[2].value() == doctest::Approx(1.0 / 16));
    CHECK(bn[3].value() == doctest::Approx(1.0 / 256));
    const auto bd = extension_coeffs(Boundary::Dirichlet, 3, two);
    CHECK(bd[0].value() == doctest::Approx(-1.0));
    CHECK(bd[1].value() == doctest::Approx(2.0));
    CHECK(bd[2].value() == doctest::Approx(8.0));
    CHECK(bd[3].value() == doctest::Approx(128.0));

    for (const auto& b : extension_coeffs(Boundary::Neumann, 50, derive_params(0.5)))
        CHECK(std::abs(b.log_abs) < 1e-15);
    // doubly exponential range survives in log form
    const auto far = extension_coeff(Boundary::Dirichlet, 60, two);
    CHECK(far.log_abs == doctest::Approx((std::ldexp(1.0, 60) - 1.0) * std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(extension_coeff(Boundary::Neumann, -1, two), DomainError);
}

TEST_CASE("gluing")
{
    const auto params = derive_params(2.0 / 3.0);
    const Propagator prop(params);
    const auto rs = find_S(prop, -500.0, -1.0);
    const auto rep = build_eigenfunction(params, rs, {1, 0, 0}, Boundary::Neumann, 3);
    CHECK(rep.junction_defect <= 1e-8);
    CHECK(rep.b[0].value() == doctest::Approx(-1.0 / params.delta).epsilon(1e-6));
    CHECK(rep.evaluate(0.0) == doctest::Approx(1.0));
    // values on I_<1> \\ I are b_0 times the base piece pulled back onto I
    for (double y : {1.0 + 1e-3, 1.1, 1.3, 1.49}) {
        const double pulled = params.delta * (y - 1.0);
        CHECK(rep.evaluate(y) == doctest::Approx(rep.b[0].value() * rep.base(pulled)).epsilon(1e-12));
    }
    // continuity across the junctions
    for (int n = 0; n < 3; ++n) {
        const double x = std::pow(params.alpha, -n);
        CHECK(rep.evaluate(x * (1 - 1e-9)) == doctest::Approx(rep.evaluate(x * (1 + 1e-9))).epsilon(1e-6));
    }
    CHECK_THROWS_AS(rep.evaluate(std::pow(params.alpha, -4.0)), DomainError);

    const auto dir = build_eigenfunction(params, rs, {1, 0, 0}, Boundary::Dirichlet, 2);
    CHECK(dir.evaluate(0.0) == 0.0);
    CHECK(std::abs(dir.evaluate(1.0)) <= 1e-8 * std::abs(dir.initial_slope));
    CHECK(dir.b[0].value() == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("glued Neumann eigenfunction at alpha = 1/2 is cos(pi x)")
{
    const auto params = derive_params(0.5);
    const Propagator prop(params);
    const auto rs = find_S(prop, -100.0, -1.0);
    const auto rep = build_eigenfunction(params, rs, {1, 0, 0}, Boundary::Neumann, 4);
    for (int i = 0; i <= 160; ++i) {
        const double x = 0.1 * i;
        CHECK(std::abs(rep.evaluate(x) - std::cos(pi * x)) <= 1e-4);
    }
}

TEST_CASE("norm ladder examples")
{
    const auto two = derive_params(2.0 / 3.0);
    const Propagator p2(two);
    const auto r2 = find_S(p2, -500.0, -1.0);
    const auto neu = norm_series(build_eigenfunction(two, r2, {1, 0, 0}, Boundary::Neumann, 4), two, 4);
    REQUIRE(neu.ratios.size() == 4);
    CHECK(neu.ratios[0] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(neu.ratios[1] == doctest::Approx(1.125).epsilon(1e-6));
    CHECK(neu.ratios[2] == doctest::Approx(1.0078125).epsilon(1e-6));
    CHECK(neu.verdict == NormVerdict::SquareSummable);
    CHECK(std::isfinite(neu.c_delta));
    CHECK(neu.c_delta == doctest::Approx(1.5 * 1.125 * 1.0078125 * (1 + 2.0 / 65536) * (1 + 2.0 / 65536 / 65536)).epsilon(1e-12));

    const auto half = derive_params(1.0 / 3.0);
    const Propagator ph(half);
    const auto rh = find_S(ph, -500.0, -1.0);
    const auto div = norm_series(build_eigenfunction(half, rh, {1, 0, 0}, Boundary::Neumann, 4), half, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(div.ratios[static_cast<std::size_t>(n)] ==
              doctest::Approx(1.0 + std::pow(0.5, 1.0 - std::ldexp(1.0, n + 1))).epsilon(1e-6));
    CHECK(div.verdict == NormVerdict::Divergent);
    CHECK(std::isinf(div.c_delta));
}

TEST_CASE("norm ladder identity by independent quadrature")
{
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        const auto rs = find_S(prop, -500.0, -1.0);
        for (Boundary bd : {Boundary::Neumann, Boundary::Dirichlet})
            for (int k = 1; k <= 2; ++k) {
                const auto rep = build_eigenfunction(params, rs, {k, 0, 0}, bd, 6);
                const auto ns = norm_series(rep, params, 6);
                const auto q = quadrature_ratios(rep, params, 6, 8);
                REQUIRE(q.size() == ns.ratios.size());
                for (std::size_t n = 0; n < q.size(); ++n)
                    CHECK(std::abs(q[n] - ns.ratios[n]) <= 1e-6 * ns.ratios[n]);
            }
    }
}

TEST_CASE("shifted labels use b_{n+p}")
{
    const auto params = derive_params(0.6);
    const Propagator prop(params);
    const auto rs = find_S(prop, -500.0, -1.0);
    for (int p : {-2, 1}) {
        const auto rep = build_eigenfunction(params, rs, {1, p, 0}, Boundary::Neumann, 5);
        const auto ns = norm_series(rep, params, 5);
        const auto q = quadrature_ratios(rep, params, 5, 8);
        REQUIRE(q.size() == ns.ratios.size());
        for (std::size_t i = 0; i < q.size(); ++i)
            CHECK(std::abs(q[i] - ns.ratios[i]) <= 1e-6 * ns.ratios[i]);
        CHECK(rep.label.value == doctest::Approx(rs.roots[0] * std::pow(params.gamma, p)));
    }
}

TEST_CASE("dichotomy and mirror symmetry")
{
    for (double a : {0.25, 1.0 / 3.0, 0.45}) {
        const auto lo = derive_params(a), hi = derive_params(1.0 - a);
        const Propagator plo(lo), phi(hi);
        const auto rlo = find_S(plo, -500.0, -1.0), rhi = find_S(phi, -500.0, -1.0);
        auto verdict = [](const ModelParams& p, const RootSet& r, Boundary b) {
            return norm_series(build_eigenfunction(p, r, {1, 0, 0}, b, 3), p, 3).verdict;
        };
        // delta < 1: Dirichlet side is square summable
        CHECK(verdict(lo, rlo, Boundary::Neumann) == NormVerdict::Divergent);
        CHECK(verdict(lo, rlo, Boundary::Dirichlet) == NormVerdict::SquareSummable);
        CHECK(verdict(hi, rhi, Boundary::Neumann) == NormVerdict::SquareSummable);
        CHECK(verdict(hi, rhi, Boundary::Dirichlet) == NormVerdict::Divergent);
        CHECK(verdict(lo, rlo, Boundary::Neumann) == verdict(hi, rhi, Boundary::Dirichlet));
    }
}

TEST_CASE("finite-level completeness")
{
    const auto params = derive_params(0.5);
    const Propagator prop(params);
    const FiniteLevelBasis basis(params, 10, 1);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> g(basis.string().size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (basis.string().positions[i] <= 1.0)
                g[i] = U(rng);
        const auto r = parseval_check(basis, g);
        CHECK(r.residual <= 1e-8 * r.norm2);
    }
    const auto rs = find_S(prop, -2e4, -1.0);
    for (int k = 1; k <= 3; ++k)
        for (int p = -10; p <= -6; ++p)
            CHECK(alignment(basis, build_eigenfunction(params, rs, {k, p, 0}, Boundary::Neumann, 10)) >= 0.999);

    std::vector<double> g(basis.string().size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (basis.string().positions[i] <= 1.0)
            g[i] = 1.0;
    const auto tail = parseval_tail(basis, g, rs);
    for (std::size_t i = 1; i < tail.size(); ++i)
        CHECK(tail[i] <= tail[i - 1]);
    // measured at alpha = 1/2: the tail from p <= -10 carries about 2% of ||g||^2
    CHECK(tail.back() <= 0.05 * tail.front());
}

TEST_CASE("quadratic form examples")
{
    const auto half = derive_params(0.5);
    const auto q = quadratic_form(half, 0, 0.0, 10);
    CHECK(quadratic_value(q.K, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quadratic_value(q.K, {0.0, 1.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    const auto p = derive_params(0.3);
    CHECK(quadratic_value(quadratic_form(p, 0, 0.0, 12).K, {0.0, 1.0}) ==
          doctest::Approx(second_moment(p)).epsilon(1e-5));
    const auto ev = sym_eigenvalues(quadratic_form(p, 3, -7.0, 8).K);
    CHECK(ev[0] > 0.0);
}

TEST_CASE("quadratic form recursion")
{
    const auto params = derive_params(0.45);
    const Propagator prop(params);
    const auto samples = support_samples(prop, -20.0, -1.0, 3, 10);
    REQUIRE(samples.size() == 3);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> N(0.0, 1.0);
    for (double l : samples) {
        std::vector<QuadraticFormSample> ks;
        for (int n = 0; n <= 9; ++n)
            ks.push_back(quadratic_form(params, n, l, 8));
        for (int n = 0; n <= 8; ++n)
            for (int t = 0; t < 10; ++t) {
                const std::array<double, 2> X{N(rng), N(rng)};
                CHECK(recursion_residual(ks[static_cast<std::size_t>(n)], ks[static_cast<std::size_t>(n + 1)], params, X) <= 1e-6);
                CHECK(tilde_recursion_residual(ks[static_cast<std::size_t>(n)], ks[static_cast<std::size_t>(n + 1)], params, X) <= 1e-6);
            }
        // the propagator of the string matches gamma_n
        CHECK(max_abs_diff(ks[4].gamma, prop.gamma_n(l, 4)) <= 1e-3 * (1.0 + max_abs(ks[4].gamma)));
    }
    CHECK_THROWS_AS(recursion_residual(quadratic_form(params, 0, -1.0), quadratic_form(params, 2, -1.0), params, {1.0, 0.0}),
                    LevelMismatchError);
}

TEST_CASE("two-sided bound for K + K o Gamma")
{
    const auto rot = lemma45_check(Mat2<double>::identity(), Mat2<double>::from(0, -1, 1, 0));
    CHECK(rot.holds);
    CHECK(rot.min_value == doctest::Approx(2.0));
    CHECK(rot.max_value == doctest::Approx(2.0));
    CHECK(rot.lower == doctest::Approx(0.25));
    CHECK(rot.upper == doctest::Approx(3.0));

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto L = Mat2<double>::from(U(rng), 0.0, U(rng), U(rng));
        const auto K = L * L.transpose() + 1e-3 * Mat2<double>::identity();
        const double th = pi * (0.5 + 0.5 * U(rng));
        const double s = std::exp(2.0 * U(rng)), sh = U(rng);
        const auto S = Mat2<double>::from(s, sh, 0.0, 1.0 / s);
        const auto Si = Mat2<double>::from(1.0 / s, -sh, 0.0, s);
        const auto R = Mat2<double>::from(std::cos(th), -std::sin(th), std::sin(th), std::cos(th));
        violations += !lemma45_check(K, S * R * Si).holds;
    }
    CHECK(violations == 0);

    // |tr| -> 2: the lower bound degrades to 0
    const double th = 1e-4;
    const auto near = lemma45_check(Mat2<double>::identity(),
                                    Mat2<double>::from(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)));
    CHECK(near.holds);
    CHECK(near.lower < 1e-15);
    CHECK(near.lower >= 0.0);

    CHECK_THROWS_AS(lemma45_check(Mat2<double>::identity(), Mat2<double>::from(2, 0, 0, 1)), PreconditionError);
    CHECK_THROWS_AS(lemma45_check(Mat2<double>::identity(), Mat2<double>::from(2, 0, 0, 0.5)), PreconditionError);
}

TEST_CASE("trace subsequence")
{
    const Propagator half(derive_params(0.5));
    const auto ts = trace_subsequence(half, -4.0, 20);
    CHECK_FALSE(ts.empty_warning);
    for (std::size_t i = 0; i < ts.traces.size(); ++i)
        CHECK(ts.traces[i] == doctest::Approx(2.0 * std::cos(std::ldexp(2.0, static_cast<int>(i)))).epsilon(1e-6));
    for (int n : ts.indices)
        CHECK(std::abs(ts.traces[static_cast<std::size_t>(n - 1)]) <= 2.0 / std::sqrt(3.0));

    const auto params = derive_params(2.0 / 3.0);
    const Propagator prop(params);
    const auto rs = find_S(prop, -500.0, -1.0);
    CHECK_THROWS_AS(trace_subsequence(prop, rs.roots[0], 10), PreconditionError);
}

TEST_CASE("bounded trace products and the energy ratio on the subsequence")
{
    // Constants measured on the first ten grid samples of supp mu in [-20, -1]
    // at alpha = 0.45 with bounded orbits through n = 20: running max of |Pi|
    // <= 6.6, C_4 <= 2.6, condition number of the normalized propagator <= 160.
    for (double a : {0.45, 0.55}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        const auto samples = support_samples(prop, -20.0, -1.0, 10, 20);
        REQUIRE(samples.size() == 10);
        for (double l : samples) {
            const auto ts = trace_subsequence(prop, l, 20);
            CHECK_FALSE(ts.empty_warning);
            double max10 = 0.0;
            for (std::size_t n = 1; n <= 10; ++n)
                max10 = std::max(max10, std::abs(ts.pi[n]));
            CHECK(ts.running_max_pi <= 8.0 * max10);
            CHECK(ts.running_max_pi <= 20.0);

            const auto ks = form_ladder(prop, l, 20, 10);
            for (int nk : ts.indices) {
                if (nk > 19)
                    continue;
                const auto r = energy_ratio_range(ks[static_cast<std::size_t>(nk)], prop.gamma_n(l, nk), params);
                CHECK(r[0] >= 1.0 / 4.0);
                CHECK(r[1] <= 4.0);
            }
            for (int n = 0; n <= 20; ++n)
                CHECK(tilde_condition(prop, l, n) <= 1e3);
        }
    }
}
