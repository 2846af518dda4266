#include "sslab/renorm_map.hpp"

#include "sslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sslab {

AffinePoint f_affine(const AffinePoint& p, const ModelParams& params)
{
    const double d = params.delta;
    const cplx s = p.x + p.y / d;
    return {p.x * s - 1.0 / d, d * p.y * s - d};
}

std::array<double, 2> f_real(const std::array<double, 2>& p, const ModelParams& params)
{
    const double d = params.delta;
    const double s = p[0] + p[1] / d;
    return {p[0] * s - 1.0 / d, d * p[1] * s - d};
}

HomogeneousTriple R_lift(const HomogeneousTriple& v, const ModelParams& params)
{
    const double d = params.delta;
    const cplx s = v[0] + v[1] / d;
    const cplx z2 = v[2] * v[2];
    return {v[0] * s - z2 / d, d * v[1] * s - d * z2, z2};
}

std::array<double, 3> R_lift(const std::array<double, 3>& v, const ModelParams& params)
{
    const double d = params.delta;
    const double s = v[0] + v[1] / d;
    const double z2 = v[2] * v[2];
    return {v[0] * s - z2 / d, d * v[1] * s - d * z2, z2};
}

double projective_distance(const HomogeneousTriple& u, const HomogeneousTriple& v)
{
    double nu = 0.0, nv = 0.0;
    for (int k = 0; k < 3; ++k) {
        nu += std::norm(u[k]);
        nv += std::norm(v[k]);
    }
    if (nu == 0.0 || nv == 0.0)
        return 1.0;
    // sin^2 of the angle via the Lagrange identity, which keeps small distances accurate
    double cross = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            cross += std::norm(u[i] * v[j] - u[j] * v[i]);
    return std::min(1.0, std::sqrt(cross / (nu * nv)));
}

HomogeneousTriple indeterminacy_point(const ModelParams& params)
{
    return {cplx(1.0), cplx(-params.delta), cplx(0.0)};
}

ProjectivePoint ProjectivePoint::make(const HomogeneousTriple& v, const ModelParams& params,
                                      double flag_tol)
{
    double big = 0.0;
    int idx = 0;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(v[k]) > big) {
            big = std::abs(v[k]);
            idx = k;
        }
    }
    if (!(big > 0.0) || !std::isfinite(big))
        throw DomainError("projective point needs a finite, nonzero homogeneous triple");

    ProjectivePoint P;
    // Dividing by the largest coordinate (phase included) makes normalization idempotent.
    const cplx pivot = v[idx];
    for (int k = 0; k < 3; ++k)
        P.v[k] = v[k] / pivot;
    P.v[idx] = cplx(1.0);

    const cplx x = P.v[0], y = P.v[1], z = P.v[2];
    P.on_D = std::abs(x + y / params.delta) <= flag_tol * (1.0 + 1.0 / params.delta);
    P.on_C = std::abs(x * y - z * z) <= flag_tol * 2.0;
    const bool real = std::abs(x.imag()) <= flag_tol && std::abs(y.imag()) <= flag_tol &&
                      std::abs(z.imag()) <= flag_tol;
    if (real) {
        const double r = x.real() * y.real() - z.real() * z.real();
        P.in_K_plus = r >= -flag_tol;
        P.in_K_minus = r <= flag_tol;
    }
    P.is_indeterminacy = projective_distance(P.v, indeterminacy_point(params)) <= flag_tol;
    return P;
}

ProjectiveImage R_homogeneous(const ProjectivePoint& P, const ModelParams& params,
                              double near_threshold)
{
    ProjectiveImage out;
    out.distance_to_indeterminacy = projective_distance(P.v, indeterminacy_point(params));
    if (P.is_indeterminacy || out.distance_to_indeterminacy <= 1e-15)
        throw IndeterminacyError("f is undefined at the indeterminacy point [1, -delta, 0]");
    out.near_indeterminacy = out.distance_to_indeterminacy < near_threshold;
    const auto image = R_lift(P.v, params);
    if (std::abs(image[0]) == 0.0 && std::abs(image[1]) == 0.0 && std::abs(image[2]) == 0.0)
        throw IndeterminacyError("R vanished at a point numerically equal to the indeterminacy point");
    out.point = ProjectivePoint::make(image, params);
    return out;
}

HomogeneousTriple infinity_preimage(const HomogeneousTriple& v, const ModelParams& params)
{
    return {v[0], v[1] / params.delta, cplx(0.0)};
}

namespace {

template <class Real>
Real log1p_exp(Real u)
{
    if (u > Real(35))
        return u + std::log1p(std::exp(-u));
    return std::log1p(std::exp(u));
}

template <class Real>
OrbitSummary green_impl(const AffinePoint& p, const ModelParams& params, const GreenConfig& config)
{
    using C = std::complex<Real>;
    const Real d = static_cast<Real>(params.delta);
    const Real log_escape = std::log(static_cast<Real>(config.escape_radius));
    const HomogeneousTriple ell = indeterminacy_point(params);

    OrbitSummary out;
    out.bounded = true;

    C x(static_cast<Real>(p.x.real()), static_cast<Real>(p.x.imag()));
    C y(static_cast<Real>(p.y.real()), static_cast<Real>(p.y.imag()));
    // Homogeneous representative (xh, yh, exp(lz)) with |xh|^2 + |yh|^2 + exp(2 lz) = 1.
    Real norm0 = std::sqrt(std::norm(x) + std::norm(y) + Real(1));
    C xh = x / norm0, yh = y / norm0;
    Real lz = -std::log(norm0);

    auto affine_log_norm = [&]() {
        return Real(0.5) * std::log(std::norm(xh) + std::norm(yh)) - lz;
    };
    auto record = [&](int n) {
        const Real zh = std::exp(lz);
        const double dist = projective_distance(
            {cplx(static_cast<double>(xh.real()), static_cast<double>(xh.imag())),
             cplx(static_cast<double>(yh.real()), static_cast<double>(yh.imag())),
             cplx(static_cast<double>(zh))},
            ell);
        out.min_distance_to_indeterminacy = std::min(out.min_distance_to_indeterminacy, dist);
        if (out.bounded && out.iterates.size() < config.log_limit && n <= config.max_iter) {
            out.iterates.push_back({cplx(static_cast<double>((xh / zh).real()),
                                         static_cast<double>((xh / zh).imag())),
                                    cplx(static_cast<double>((yh / zh).real()),
                                         static_cast<double>((yh / zh).imag()))});
        }
    };

    Real u = affine_log_norm();
    Real G = log1p_exp(u);
    Real scale = Real(1); // 2^-n
    out.max_norm = static_cast<double>(std::exp(std::min(u, Real(700))));
    record(0);
    if (u > log_escape) {
        out.bounded = false;
        out.escape_step = 0;
    }

    // Plain affine iteration while it cannot overflow, so that orbits which are
    // exact in floating point (the fixed point (1, 1), for one) stay exact.
    bool affine = std::sqrt(std::norm(x) + std::norm(y)) < Real(1e60);
    int n = 0;
    while (n < config.max_iter) {
        if (affine) {
            const C s = x + y / d;
            const C nx = x * s - Real(1) / d;
            const C ny = d * y * s - d;
            x = nx;
            y = ny;
            const Real nrm = std::sqrt(std::norm(x) + std::norm(y) + Real(1));
            xh = x / nrm;
            yh = y / nrm;
            lz = -std::log(nrm);
            affine = nrm < Real(1e60);
            ++n;
            scale *= Real(0.5);
            u = Real(0.5) * std::log(std::norm(x) + std::norm(y));
            const Real G_next = scale * log1p_exp(u);
            record(n);
            if (out.bounded) {
                if (u > log_escape) {
                    out.bounded = false;
                    out.escape_step = n;
                } else {
                    out.max_norm = std::max(out.max_norm, static_cast<double>(std::exp(u)));
                }
            }
            const bool settled = std::abs(G_next - G) < static_cast<Real>(config.convergence_tol);
            G = G_next;
            if (settled && !out.bounded) {
                out.converged = true;
                break;
            }
            continue;
        }
        const Real z2 = std::exp(Real(2) * lz);
        const C s = xh + yh / d;
        const C rx = xh * s - z2 / d;
        const C ry = d * yh * s - d * z2;
        const Real nr2 = std::norm(rx) + std::norm(ry) + z2 * z2;
        if (!(nr2 > Real(0)))
            break; // landed on the indeterminacy point
        const Real nr = std::sqrt(nr2);
        xh = rx / nr;
        yh = ry / nr;
        lz = Real(2) * lz - std::log(nr);
        ++n;
        scale *= Real(0.5);

        u = affine_log_norm();
        const Real G_next = scale * log1p_exp(u);
        record(n);
        if (out.bounded) {
            if (u > log_escape) {
                out.bounded = false;
                out.escape_step = n;
            } else {
                out.max_norm = std::max(out.max_norm, static_cast<double>(std::exp(u)));
            }
        }
        const bool settled = std::abs(G_next - G) < static_cast<Real>(config.convergence_tol);
        G = G_next;
        if (settled && !out.bounded) {
            out.converged = true;
            break;
        }
    }
    out.iterations = n;
    if (out.bounded)
        out.converged = std::abs(G) < static_cast<Real>(config.convergence_tol) || n >= config.max_iter;
    out.green_estimate = static_cast<double>(std::max(G, Real(0)));
    return out;
}

} // namespace

OrbitSummary green(const AffinePoint& p, const ModelParams& params, const GreenConfig& config)
{
    OrbitSummary out = green_impl<double>(p, params, config);
    const bool borderline = out.bounded && out.max_norm * 10.0 >= config.escape_radius;
    if (config.extended_recheck && borderline &&
        std::numeric_limits<long double>::digits > std::numeric_limits<double>::digits) {
        out = green_impl<long double>(p, params, config);
        out.rechecked = true;
    }
    return out;
}

AlgebraicInvariants algebraic_invariants(const std::array<double, 3>& X, const ModelParams& params)
{
    const auto [x, y, z] = X;
    const auto RX = R_lift(X, params);
    AlgebraicInvariants inv;
    inv.r = x * y - z * z;
    inv.p = params.alpha * (x + y / params.delta);
    inv.r_of_R = RX[0] * RX[1] - RX[2] * RX[2];
    const double rhs = params.gamma * inv.p * inv.p * inv.r;
    inv.residual = std::abs(inv.r_of_R - rhs);
    inv.scale = std::abs(RX[0] * RX[1]) + RX[2] * RX[2] +
                params.gamma * inv.p * inv.p * (std::abs(x * y) + z * z);
    return inv;
}

double normalized_cone_factor(const std::array<double, 3>& X, const ModelParams& params)
{
    const auto RX = R_lift(X, params);
    const double nx2 = X[0] * X[0] + X[1] * X[1] + X[2] * X[2];
    const double nr2 = RX[0] * RX[0] + RX[1] * RX[1] + RX[2] * RX[2];
    const double p = params.alpha * (X[0] + X[1] / params.delta);
    return params.gamma * nx2 * p * p / nr2;
}

ConeReport cone_checks(std::span<const std::array<double, 3>> samples,
                       std::span<const std::array<double, 2>> phi_points_negative,
                       const ModelParams& params)
{
    constexpr double tol = 1e-12;
    ConeReport rep;
    for (const auto& X : samples) {
        const auto inv = algebraic_invariants(X, params);
        if (inv.r == 0.0)
            continue;
        ++rep.invariance_samples;
        const double margin = (inv.r > 0.0 ? inv.r_of_R : -inv.r_of_R) / inv.scale;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -tol)
            ++rep.invariance_violations;
    }
    for (const auto& ad : phi_points_negative) {
        ++rep.phi_samples;
        const double r = ad[0] * ad[1] - 1.0;
        const double margin = -r / (std::abs(ad[0] * ad[1]) + 1.0);
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -tol)
            ++rep.phi_violations;
    }
    return rep;
}

std::vector<LogProjective> orbit_of_D(const AffinePoint& d_point, int n_max, const ModelParams& params)
{
    const double scale = std::abs(d_point.x) + std::abs(d_point.y) / params.delta;
    if (std::abs(d_point.x + d_point.y / params.delta) > 1e-12 * std::max(1.0, scale))
        throw DomainError("orbit_of_D needs a point on the line x + y/delta = 0");
    std::vector<LogProjective> orbit;
    if (n_max < 1)
        return orbit;
    const AffinePoint first = f_affine(d_point, params);
    if (std::abs(first.x.imag()) > 1e-12 || std::abs(first.y.imag()) > 1e-12)
        throw DomainError("image of D left the real plane");
    LogProjective cur;
    cur.sign_x = first.x.real() < 0.0 ? -1 : 1;
    cur.sign_y = first.y.real() < 0.0 ? -1 : 1;
    cur.log_x = std::log(std::abs(first.x.real()));
    cur.log_y = std::log(std::abs(first.y.real()));
    // f(D) lies on C: xy = z^2 (with z = 1), where f is coordinate squaring.
    if (std::abs(cur.log_x + cur.log_y) > 1e-12)
        throw DomainError("image of D is not on the hypersurface C");
    orbit.push_back(cur);
    for (int n = 2; n <= n_max; ++n) {
        cur.sign_x = 1;
        cur.sign_y = 1;
        cur.log_x *= 2.0;
        cur.log_y *= 2.0;
        orbit.push_back(cur);
    }
    return orbit;
}

} // namespace sslab
