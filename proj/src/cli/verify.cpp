#include "sslab/cli.hpp"

#include "sslab/errors.hpp"
#include "sslab/halfline.hpp"
#include "sslab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>

namespace sslab::cli {

namespace {

struct Outcome {
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

Outcome at_most(double value, double threshold, std::string detail = {})
{
    return {value <= threshold, value, threshold, std::move(detail)};
}

Outcome at_least(double value, double threshold, std::string detail = {})
{
    return {value >= threshold, value, threshold, std::move(detail)};
}

struct Context {
    RunConfig config;

    std::mt19937_64 rng(std::size_t index) const { return std::mt19937_64(config.seed + 7919 * index); }

    // InSupport samples with bounded orbits, shared by the section-4 checks
    const std::vector<double>& support(double alpha) const
    {
        std::lock_guard lock(mutex_);
        auto& slot = alpha < 0.5 ? lo_ : hi_;
        if (slot.empty())
            slot = support_samples(Propagator(derive_params(alpha)), -20.0, -1.0, 10, 20);
        return slot;
    }

private:
    mutable std::mutex mutex_;
    mutable std::vector<double> lo_, hi_;
};

struct Check {
    const char* name;
    const char* module;
    std::function<Outcome(const Context&, std::size_t)> run;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------- model

Outcome model_identities(const Context&, std::size_t)
{
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double a = i / 100.0;
        const auto p = derive_params(a);
        worst = std::max({worst, rel(p.delta * p.gamma, 1.0 / ((1 - a) * (1 - a))), rel(p.gamma, p.delta / (a * a)),
                          rel(p.w1 + p.w2, 1.0), rel(p.M, p.w1 * a * p.M + p.w2 * (a + (1 - a) * p.M))});
    }
    return at_most(worst, 1e-14, "99 alphas");
}

Outcome model_additivity(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
        const auto p = derive_params(a);
        const auto prefix = BlowupPrefix::parse("121");
        std::vector<std::vector<std::uint8_t>> words{{}};
        for (int depth = 0; depth < 7; ++depth) {
            std::vector<std::vector<std::uint8_t>> next;
            for (const auto& w : words) {
                const double parent = cell_mass(p, prefix, CellAddress{3, w});
                auto w1 = w, w2 = w;
                w1.push_back(1);
                w2.push_back(2);
                const double kids = cell_mass(p, prefix, CellAddress{3, w1}) + cell_mass(p, prefix, CellAddress{3, w2});
                worst = std::max(worst, std::abs(kids - parent) / parent);
                next.push_back(std::move(w1));
                next.push_back(std::move(w2));
            }
            words = std::move(next);
        }
    }
    return at_most(worst, 1e-14, "cells to depth 7 below I_<3>");
}

Outcome model_nesting(const Context&, std::size_t)
{
    int bad = 0, tested = 0;
    for (double a : {0.2, 0.37, 0.5, 0.8})
        for (const char* text : {"1111", "2222", "1212", "2112", "12211"}) {
            const auto prefix = BlowupPrefix::parse(text);
            const auto p = derive_params(a);
            for (std::size_t n = 0; n < prefix.size(); ++n) {
                ++tested;
                bad += !cell_interval(p, prefix, CellAddress{n + 1, {}})
                            .contains(cell_interval(p, prefix, CellAddress{n, {}}));
            }
        }
    return at_most(bad, 0.0, std::to_string(tested) + " pairs");
}

// -------------------------------------------------------- string_oracle

Outcome oracle_unimodular(const Context&, std::size_t)
{
    const auto s = discretize(derive_params(2.0 / 3.0), BlowupPrefix{}, 16);
    double worst = 0.0;
    for (double l : {-1e4, -300.0, -1.0, 0.0, 5.0}) {
        const auto m = propagate(s, l);
        // ad - bc cancels once the entries grow; measured against the entry scale
        worst = std::max(worst, std::abs(m.det() - 1.0) / std::max(1.0, max_abs(m) * max_abs(m) * 1e-6));
    }
    worst = std::max(worst, std::abs(propagate(s, cplx(-50.0, 3.0)).det() - cplx(1.0)));
    return at_most(worst, 1e-10, "2^16 masses, |lambda| <= 1e4");
}

Outcome oracle_herglotz(const Context&, std::size_t)
{
    const auto s = discretize(derive_params(0.3), BlowupPrefix{}, 10);
    int bad = 0;
    for (double re : {-80.0, -10.0, -1.0, 0.0, 3.0})
        for (double im : {0.01, 1.0, 30.0}) {
            const auto m = propagate(s, cplx(re, im));
            bad += !(std::imag(std::conj(m(0, 0)) * m(1, 0)) > 0.0);
        }
    return at_most(bad, 0.0, "15 points with Im lambda > 0");
}

Outcome oracle_count(const Context&, std::size_t)
{
    const auto s = discretize(derive_params(0.6), BlowupPrefix{}, 9);
    const TridiagonalOperator op(s, Boundary::Dirichlet);
    int bad = 0;
    std::size_t prev = 0;
    for (int i = 0; i <= 200; ++i) {
        const auto c = eigen_count(op, -2e5 + 1e3 * i);
        bad += c < prev;
        prev = c;
    }
    const auto a = eigen_count(op, -5000.0), b = eigen_count(op, -500.0), c = eigen_count(op, -50.0);
    bad += (b - a) + (c - b) != c - a;
    return at_most(bad, 0.0, "monotone on 201 points, additive over nested windows");
}

// ----------------------------------------------------------- renorm_map

Outcome renorm_homogeneity(const Context& ctx, std::size_t idx)
{
    const auto p = derive_params(0.3);
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const HomogeneousTriple X{cplx(U(rng), U(rng)), cplx(U(rng)), cplx(U(rng))};
        const cplx t(U(rng), U(rng));
        const auto a = R_lift({t * X[0], t * X[1], t * X[2]}, p);
        const auto b = R_lift(X, p);
        for (int k = 0; k < 3; ++k)
            worst = std::max(worst, std::abs(a[k] - t * t * b[k]) / (1.0 + std::abs(t * t * b[k])));
    }
    return at_most(worst, 1e-12, "1000 complex triples");
}

Outcome renorm_orbit_of_D(const Context&, std::size_t)
{
    double worst = 0.0;
    int sign_errors = 0;
    for (double delta : {0.5, 2.0, 3.0}) {
        const auto p = derive_params(delta / (1.0 + delta));
        const double ld = std::log(p.delta);
        for (double x : {1.0, -0.4, 7.0}) {
            const auto orbit = orbit_of_D({x, -p.delta * x}, 40, p);
            sign_errors += orbit[0].sign_x != -1 || orbit[0].sign_y != -1;
            worst = std::max({worst, std::abs(orbit[0].log_x + ld), std::abs(orbit[0].log_y - ld)});
            for (int n = 1; n < 40; ++n) {
                const auto& e = orbit[static_cast<std::size_t>(n)];
                const double scale = std::ldexp(std::abs(ld), n);
                sign_errors += e.sign_x != 1 || e.sign_y != 1;
                worst = std::max({worst, std::abs(e.log_x + std::ldexp(ld, n)) / scale,
                                  std::abs(e.log_y - std::ldexp(ld, n)) / scale});
            }
        }
    }
    if (sign_errors > 0)
        return {false, worst, 1e-10, std::to_string(sign_errors) + " sign errors"};
    return at_most(worst, 1e-10, "n <= 40, delta in {1/2, 2, 3}");
}

Outcome renorm_attraction(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {2.0 / 3.0, 1.0 / 3.0}) {
        const auto p = derive_params(a);
        // C+ (|x| < |y|) flows to x+ = [0, 1, 0]; its mirror image flows to [1, 0, 0]
        const bool plus = p.delta > 1.0;
        for (double x : {0.2, 0.6, 0.9}) {
            const double px = plus ? x : 1.0 / x;
            auto P = ProjectivePoint::affine({px, 1.0 / px}, p);
            for (int n = 0; n < 12; ++n)
                P = R_homogeneous(P, p).point;
            const HomogeneousTriple target = plus ? HomogeneousTriple{cplx(0.0), cplx(1.0), cplx(0.0)}
                                                  : HomogeneousTriple{cplx(1.0), cplx(0.0), cplx(0.0)};
            worst = std::max(worst, projective_distance(P.v, target));
        }
    }
    return at_most(worst, 1e-12, "12 steps along C");
}

Outcome renorm_infinity(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {0.3, 0.6}) {
        const auto p = derive_params(a);
        for (double x : {-2.0, 0.0, 0.4, 5.0}) {
            const HomogeneousTriple v{cplx(x), cplx(1.0), cplx(0.0)};
            const HomogeneousTriple expected{cplx(x), cplx(1.0 / p.delta), cplx(0.0)};
            worst = std::max(worst, projective_distance(infinity_preimage(v, p), expected));
        }
    }
    return at_most(worst, 1e-14, "preimage [x, y/delta, 0]");
}

Outcome renorm_r_identity(const Context& ctx, std::size_t idx)
{
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    double worst = 0.0;
    for (double a : {0.25, 0.5, 0.7})
        for (int i = 0; i < 2000; ++i) {
            const auto inv = algebraic_invariants({U(rng), U(rng), U(rng)}, derive_params(a));
            worst = std::max(worst, inv.residual / inv.scale);
        }
    return at_most(worst, 1e-9, "6000 samples");
}

Outcome renorm_cone(const Context& ctx, std::size_t idx)
{
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    std::size_t bad = 0, total = 0;
    for (double a : {1.0 / 3.0, 2.0 / 3.0}) {
        const auto p = derive_params(a);
        std::vector<std::array<double, 3>> samples;
        for (int i = 0; i < 2000; ++i)
            samples.push_back({U(rng), U(rng), U(rng)});
        const Propagator prop(p);
        std::vector<std::array<double, 2>> phis;
        for (int i = 0; i <= 200; ++i)
            phis.push_back(prop.phi_fast(-0.25 * i));
        const auto rep = cone_checks(samples, phis, p);
        bad += rep.invariance_violations + rep.phi_violations;
        total += rep.invariance_samples + rep.phi_samples;
    }
    return at_most(static_cast<double>(bad), 0.0, std::to_string(total) + " samples");
}

Outcome renorm_green(const Context& ctx, std::size_t idx)
{
    const auto p = derive_params(2.0 / 3.0);
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    double worst = 0.0;
    int tested = 0;
    for (int i = 0; i < 300; ++i) {
        const AffinePoint q{U(rng), U(rng)};
        const auto g0 = green(q, p);
        if (g0.green_estimate < 1e-3)
            continue;
        ++tested;
        const auto g1 = green(f_affine(q, p), p);
        worst = std::max(worst, std::abs(g1.green_estimate - 2.0 * g0.green_estimate) / (1.0 + g1.green_estimate));
    }
    if (tested < 100)
        return {false, worst, 1e-6, "only " + std::to_string(tested) + " escaping samples"};
    return at_most(worst, 1e-6, std::to_string(tested) + " escaping samples");
}

// ----------------------------------------------------------- propagator

Outcome prop_semiconjugacy(const Context& ctx, std::size_t)
{
    double worst = 0.0;
    for (double a : {0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        ModelParams map_params = params;
        if (ctx.config.inject_fault)
            map_params.delta *= 1.0 + 1e-3;
        for (int i = 0; i <= 200; ++i) {
            const double l = -0.25 * i;
            const auto p = prop.phi(l);
            const auto q = prop.phi(params.gamma * l);
            const auto fp = f_real({p.a, p.d}, map_params);
            worst = std::max(worst, std::hypot(fp[0] - q.a, fp[1] - q.d) / (1.0 + std::hypot(q.a, q.d)));
        }
    }
    return at_most(worst, 1e-8, ctx.config.inject_fault ? "delta corrupted by 1e-3" : "lambda in [-50, 0]");
}

Outcome prop_determinant(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0, 0.8}) {
        const Propagator prop(derive_params(a));
        for (int i = 0; i < 300; ++i) {
            const double l = -50.0 * i / 299.0;
            const auto e = prop.entries(l);
            worst = std::max({worst, std::abs(e.a * e.d - e.b * e.c - 1.0), std::abs(e.a * e.d - l * e.b * e.b - 1.0)});
        }
    }
    return at_most(worst, 1e-9, "1200 samples of ad - bc and ad - lambda b^2");
}

Outcome prop_c_lambda_b(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0, 0.8}) {
        const Propagator prop(derive_params(a));
        for (int i = 0; i < 300; ++i) {
            const double l = -50.0 * i / 299.0;
            const auto e = prop.entries(l);
            worst = std::max(worst, std::abs(e.c - l * e.b) / (1.0 + std::abs(l * e.b)));
        }
    }
    return at_most(worst, 1e-9, "1200 samples");
}

Outcome prop_herglotz(const Context&, std::size_t)
{
    int bad = 0;
    for (double a : {0.3, 0.7}) {
        const Propagator prop(derive_params(a));
        for (double re : {-40.0, -5.0, 0.0, 2.0})
            for (double im : {0.05, 1.0, 10.0}) {
                const auto e = prop.entries(cplx(re, im));
                bad += !(std::imag(std::conj(e.a) * e.c) > 0.0);
            }
    }
    return at_most(bad, 0.0, "24 points with Im lambda > 0");
}

Outcome prop_oracle_agreement(const Context&, std::size_t)
{
    double final_err = 0.0;
    int non_monotone = 0;
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        double prev = 1e300;
        for (int level : {8, 10, 12, 14}) {
            const auto s = discretize(params, BlowupPrefix{}, level);
            double err = 0.0;
            for (int i = 0; i < 50; ++i) {
                const double l = -40.0 * i / 49.0;
                err = std::max(err, max_abs_diff(prop.entries(l).matrix(), propagate(s, l)));
            }
            non_monotone += err >= prev;
            prev = err;
        }
        final_err = std::max(final_err, prev);
    }
    if (non_monotone > 0)
        return {false, final_err, 4e-4, "error not decreasing in the level"};
    return at_most(final_err, 4e-4, "level 14, midpoint masses");
}

Outcome prop_hypothesis(const Context&, std::size_t)
{
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
        const auto p = derive_params(i / 100.0);
        worst = std::max(worst, std::abs(p.alpha * (1.0 + 1.0 / p.delta) - 1.0));
    }
    return at_most(worst, 1e-15, "alpha (1 + 1/delta) = 1");
}

// ------------------------------------------------------------- spectral

Outcome spec_zeta_scaling(const Context&, std::size_t)
{
    double worst = 0.0;
    int tested = 0;
    for (double a : {1.0 / 3.0, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        for (int i = 0; i <= 60; ++i) {
            const double l = 1.0 - 20.0 * i / 60.0;
            const auto z0 = lyapunov(prop, l);
            if (z0.zeta <= 1e-3)
                continue;
            ++tested;
            const auto z1 = lyapunov(prop, params.gamma * l);
            worst = std::max(worst, std::abs(z1.zeta - 2.0 * z0.zeta) / (1.0 + z1.zeta));
        }
    }
    return at_most(worst, 1e-6, std::to_string(tested) + " points with zeta > 1e-3");
}

Outcome spec_labels_vs_oracle(const Context&, std::size_t)
{
    double worst = 0.0;
    int mismatched = 0;
    for (double a : {1.0 / 3.0, 0.6}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        const auto rs = find_S(prop, -1e6, -1.0);
        for (int n : {0, 2, 4}) {
            const auto s = discretize(params, BlowupPrefix::all_ones(static_cast<std::size_t>(n)), n + 12);
            for (Boundary bd : {Boundary::Neumann, Boundary::Dirichlet}) {
                const auto labels = enumerate_eigenvalues(rs, n, -200.0, 0.0, bd);
                const auto oracle = eigen_solve(build_operator(s, bd), -200.0, 0.5).values;
                if (labels.size() != oracle.size()) {
                    ++mismatched;
                    continue;
                }
                for (std::size_t i = 0; i < labels.size(); ++i)
                    worst = std::max(worst, std::abs(labels[i].value - oracle[i]) / (1.0 + std::abs(labels[i].value)));
            }
        }
    }
    if (mismatched > 0)
        return {false, worst, 1e-3, std::to_string(mismatched) + " windows with a count mismatch"};
    return at_most(worst, 1e-3, "levels 0, 2, 4 in [-200, 0]");
}

Outcome spec_gap_openness(const Context&, std::size_t)
{
    int bad = 0, tested = 0;
    for (double a : {1.0 / 3.0, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        const auto rs = find_S(prop, -1e4, -1.0);
        for (std::size_t k = 0; k < 3; ++k)
            for (int p = -3; p <= 3; ++p) {
                const double l = rs.roots[k] * std::pow(params.gamma, p);
                for (double eps : {0.0, -1e-3, -1e-6, 1e-6, 1e-3}) {
                    ++tested;
                    bad += classify(prop, l * (1.0 + eps)).verdict != SpectralClass::Gap;
                }
            }
    }
    return at_most(bad, 0.0, std::to_string(tested) + " points around lambda_{k,p}");
}

Outcome spec_isolation(const Context&, std::size_t)
{
    const auto params = derive_params(2.0 / 3.0);
    const Propagator prop(params);
    const auto rs = find_S(prop, -1e6, -1.0);
    double worst = 1e300;
    for (int n = 1; n <= 6; ++n) {
        const auto labels = enumerate_eigenvalues(rs, n, -50.0, -1.0, Boundary::Dirichlet);
        double gap = 1e300;
        for (std::size_t i = 1; i < labels.size(); ++i)
            gap = std::min(gap, labels[i].value - labels[i - 1].value);
        worst = std::min(worst, gap * std::pow(params.gamma, n));
    }
    return at_least(worst, 40.0, "gamma^n times min spacing in [-50, -1), n <= 6");
}

Outcome spec_zero_mode(const Context&, std::size_t)
{
    const IdsOracle oracle(derive_params(0.4), BlowupPrefix::all_ones(3), 4);
    const auto all = oracle.window(-1e9, 0.0);
    const bool ok = all.count_neumann == oracle.size() - 1 && all.count_dirichlet == oracle.size();
    return {ok, static_cast<double>(all.count_neumann), static_cast<double>(oracle.size() - 1),
            "Neumann count below 0"};
}

// ------------------------------------------------------------- halfline

Outcome half_norm_ladder(const Context&, std::size_t)
{
    double worst = 0.0;
    for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        const auto params = derive_params(a);
        const auto rs = find_S(Propagator(params), -500.0, -1.0);
        for (Boundary bd : {Boundary::Neumann, Boundary::Dirichlet}) {
            const auto rep = build_eigenfunction(params, rs, {1, 0, 0}, bd, 6);
            const auto ns = norm_series(rep, params, 6);
            const auto q = quadrature_ratios(rep, params, 6, 8);
            for (std::size_t n = 0; n < q.size(); ++n)
                worst = std::max(worst, std::abs(q[n] - ns.ratios[n]) / ns.ratios[n]);
        }
    }
    return at_most(worst, 1e-6, "levels <= 6, both boundaries");
}

NormVerdict verdict_at(double alpha, Boundary bd)
{
    const auto params = derive_params(alpha);
    const auto rs = find_S(Propagator(params), -500.0, -1.0);
    return norm_series(build_eigenfunction(params, rs, {1, 0, 0}, bd, 3), params, 3).verdict;
}

Outcome half_dichotomy(const Context&, std::size_t)
{
    int bad = 0;
    for (double a : {0.25, 1.0 / 3.0, 0.45, 0.55, 2.0 / 3.0, 0.75}) {
        const bool big = derive_params(a).delta > 1.0;
        bad += (verdict_at(a, Boundary::Neumann) == NormVerdict::SquareSummable) != big;
        bad += (verdict_at(a, Boundary::Dirichlet) == NormVerdict::SquareSummable) == big;
    }
    return at_most(bad, 0.0, "12 verdicts");
}

Outcome half_mirror(const Context&, std::size_t)
{
    int bad = 0;
    for (double a : {0.25, 1.0 / 3.0, 0.45}) {
        bad += verdict_at(a, Boundary::Neumann) != verdict_at(1.0 - a, Boundary::Dirichlet);
        bad += verdict_at(a, Boundary::Dirichlet) != verdict_at(1.0 - a, Boundary::Neumann);
    }
    return at_most(bad, 0.0, "alpha <-> 1 - alpha with boundaries swapped");
}

Outcome half_tilde_condition(const Context& ctx, std::size_t)
{
    double worst = 0.0;
    for (double a : {0.45, 0.55}) {
        const Propagator prop(derive_params(a));
        for (double l : ctx.support(a))
            for (int n = 0; n <= 20; ++n)
                worst = std::max(worst, tilde_condition(prop, l, n));
    }
    return at_most(worst, 1e3, "20 InSupport samples, n <= 20");
}

Outcome half_trace_products(const Context& ctx, std::size_t)
{
    double worst = 0.0;
    int unstable = 0;
    for (double a : {0.45, 0.55}) {
        const Propagator prop(derive_params(a));
        for (double l : ctx.support(a)) {
            const auto ts = trace_subsequence(prop, l, 20);
            double max10 = 0.0;
            for (std::size_t n = 1; n <= 10; ++n)
                max10 = std::max(max10, std::abs(ts.pi[n]));
            unstable += ts.running_max_pi > 8.0 * max10;
            worst = std::max(worst, ts.running_max_pi);
        }
    }
    if (unstable > 0)
        return {false, worst, 20.0, std::to_string(unstable) + " samples with a growing running max"};
    return at_most(worst, 20.0, "running max of |Pi_<n>|, n <= 20");
}

Outcome half_energy_ratio(const Context& ctx, std::size_t)
{
    double lo = 1e300, hi = 0.0;
    int empty = 0;
    for (double a : {0.45, 0.55}) {
        const auto params = derive_params(a);
        const Propagator prop(params);
        for (double l : ctx.support(a)) {
            const auto ts = trace_subsequence(prop, l, 20);
            empty += ts.empty_warning;
            const auto ks = form_ladder(prop, l, 20, 10);
            for (int nk : ts.indices) {
                if (nk > 19)
                    continue;
                const auto r = energy_ratio_range(ks[static_cast<std::size_t>(nk)], prop.gamma_n(l, nk), params);
                lo = std::min(lo, r[0]);
                hi = std::max(hi, r[1]);
            }
        }
    }
    const double c4 = std::max(hi, 1.0 / lo);
    return {c4 <= 4.0 && empty == 0, c4, 4.0,
            "worst of max ratio and 1 / min ratio on the trace subsequence"};
}

Outcome half_lemma45(const Context& ctx, std::size_t idx)
{
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto L = Mat2<double>::from(U(rng), 0.0, U(rng), U(rng));
        const auto K = L * L.transpose() + 1e-3 * Mat2<double>::identity();
        const double th = std::numbers::pi * (0.5 + 0.5 * U(rng));
        const double s = std::exp(2.0 * U(rng)), sh = U(rng);
        const auto S = Mat2<double>::from(s, sh, 0.0, 1.0 / s);
        const auto Si = Mat2<double>::from(1.0 / s, -sh, 0.0, s);
        const auto R = Mat2<double>::from(std::cos(th), -std::sin(th), std::sin(th), std::cos(th));
        bad += !lemma45_check(K, S * R * Si).holds;
    }
    return at_most(bad, 0.0, "10000 random (K, G)");
}

Outcome half_recursion(const Context& ctx, std::size_t idx)
{
    const auto params = derive_params(0.45);
    auto rng = ctx.rng(idx);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst = 0.0;
    const auto& samples = ctx.support(0.45);
    for (std::size_t s = 0; s < 3 && s < samples.size(); ++s) {
        std::vector<QuadraticFormSample> ks;
        for (int n = 0; n <= 9; ++n)
            ks.push_back(quadratic_form(params, n, samples[s], 8));
        for (std::size_t n = 0; n + 1 < ks.size(); ++n)
            for (int t = 0; t < 10; ++t) {
                const std::array<double, 2> X{N(rng), N(rng)};
                worst = std::max({worst, recursion_residual(ks[n], ks[n + 1], params, X),
                                  tilde_recursion_residual(ks[n], ks[n + 1], params, X)});
            }
    }
    return at_most(worst, 1e-6, "n <= 8 at 3 InSupport samples");
}

Outcome half_parseval(const Context& ctx, std::size_t idx)
{
    const auto params = derive_params(0.5);
    const FiniteLevelBasis basis(params, 10, 1, ctx.config.seed);
    auto rng = ctx.rng(idx);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> g(basis.string().size(), 0.0);
        const double support = std::pow(2.0, 1.0 + 9.0 * (0.5 + 0.5 * U(rng)));
        for (std::size_t i = 0; i < g.size(); ++i)
            if (basis.string().positions[i] <= support)
                g[i] = U(rng);
        const auto r = parseval_check(basis, g);
        worst = std::max(worst, r.residual / r.norm2);
    }
    return at_most(worst, 1e-8, "20 random g at level 10");
}

// ------------------------------------------------------------------ cli

Outcome cli_determinism(const Context& ctx, std::size_t)
{
    RunConfig c;
    c.alpha = 2.0 / 3.0;
    c.points = 12;
    c.window_lo = -20.0;
    c.seed = ctx.config.seed;
    c.jobs = 1;
    const std::string one = to_csv(cmd_ids(c)) + to_json(cmd_ids(c));
    c.jobs = 4;
    const std::string four = to_csv(cmd_ids(c)) + to_json(cmd_ids(c));
    const bool hashed = one.find(config_hash(c)) != std::string::npos;
    return {one == four && hashed, one == four ? 0.0 : 1.0, 0.0, "ids output at jobs 1 and 4, config hash present"};
}

const std::vector<Check>& suite()
{
    static const std::vector<Check> checks{
        {"algebraic_identities", "model", model_identities},
        {"measure_additivity", "model", model_additivity},
        {"nesting", "model", model_nesting},
        {"unimodularity", "string_oracle", oracle_unimodular},
        {"herglotz_sign", "string_oracle", oracle_herglotz},
        {"eigen_count_monotone", "string_oracle", oracle_count},
        {"homogeneity", "renorm_map", renorm_homogeneity},
        {"orbit_of_D", "renorm_map", renorm_orbit_of_D},
        {"attraction_along_C", "renorm_map", renorm_attraction},
        {"infinity_preimage", "renorm_map", renorm_infinity},
        {"r_of_R_identity", "renorm_map", renorm_r_identity},
        {"cone_invariance", "renorm_map", renorm_cone},
        {"green_functional_equation", "renorm_map", renorm_green},
        {"semiconjugacy", "propagator", prop_semiconjugacy},
        {"determinant_identities", "propagator", prop_determinant},
        {"c_equals_lambda_b", "propagator", prop_c_lambda_b},
        {"herglotz", "propagator", prop_herglotz},
        {"oracle_agreement", "propagator", prop_oracle_agreement},
        {"hypothesis_H", "propagator", prop_hypothesis},
        {"zeta_scaling", "spectral", spec_zeta_scaling},
        {"labels_match_oracle", "spectral", spec_labels_vs_oracle},
        {"gap_openness", "spectral", spec_gap_openness},
        {"isolation", "spectral", spec_isolation},
        {"neumann_zero_mode", "spectral", spec_zero_mode},
        {"norm_ladder_identity", "halfline", half_norm_ladder},
        {"dichotomy", "halfline", half_dichotomy},
        {"mirror_symmetry", "halfline", half_mirror},
        {"tilde_condition", "halfline", half_tilde_condition},
        {"trace_products_bounded", "halfline", half_trace_products},
        {"energy_ratio", "halfline", half_energy_ratio},
        {"lemma45_bounds", "halfline", half_lemma45},
        {"form_recursion", "halfline", half_recursion},
        {"parseval", "halfline", half_parseval},
        {"determinism", "cli", cli_determinism},
    };
    return checks;
}

} // namespace

ResultRecord cmd_verify(const RunConfig& config)
{
    validate(config);
    Context ctx;
    ctx.config = config;
    const auto& checks = suite();
    std::vector<Outcome> outcomes(checks.size());
    std::vector<double> seconds(checks.size(), 0.0);
    parallel_for(checks.size(), config.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            outcomes[i] = checks[i].run(ctx, i);
        } catch (const std::exception& e) {
            outcomes[i] = {false, std::nan(""), std::nan(""), std::string("error: ") + e.what()};
        }
        seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    ResultRecord r{"verify", config, {"module", "check", "passed", "value", "threshold", "detail"}, {}, {}, {}, false, {}};
    if (config.timing)
        r.columns.push_back("seconds");
    std::size_t failed = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& o = outcomes[i];
        failed += !o.passed;
        nlohmann::json row = {checks[i].module, checks[i].name, o.passed, o.value, o.threshold, o.detail};
        if (config.timing)
            row.push_back(seconds[i]);
        r.rows.push_back(std::move(row));
        char line[128];
        std::snprintf(line, sizeof line, "%-4s %-14s %-26s %8.3f s", o.passed ? "ok" : "FAIL", checks[i].module,
                      checks[i].name, seconds[i]);
        r.diagnostics.emplace_back(line);
    }
    r.check_failed = failed > 0;
    r.extra = {{"checks", checks.size()}, {"failed", failed}};
    return r;
}

} // namespace sslab::cli
