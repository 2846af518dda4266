#pragma once

#include "sslab/mat2.hpp"
#include "sslab/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sslab {

/// Point of C^2, the affine chart z = 1.
struct AffinePoint {
    cplx x{0.0};
    cplx y{0.0};
};

/// The degree-2 map f(x, y) = (x(x + y/delta) - 1/delta, delta y (x + y/delta) - delta).
AffinePoint f_affine(const AffinePoint& p, const ModelParams& params);

/// Real-coordinate version of f_affine, used on the real curve phi(R).
std::array<double, 2> f_real(const std::array<double, 2>& p, const ModelParams& params);

using HomogeneousTriple = std::array<cplx, 3>;

/// The homogeneous lift R of f on C^3. R vanishes exactly on C(1, -delta, 0).
HomogeneousTriple R_lift(const HomogeneousTriple& v, const ModelParams& params);
std::array<double, 3> R_lift(const std::array<double, 3>& v, const ModelParams& params);

/// Chordal (Fubini-Study) distance between two points of P^2, in [0, 1].
double projective_distance(const HomogeneousTriple& u, const HomogeneousTriple& v);

/// Point of P^2 stored with unit max-modulus coordinates plus geometric flags.
struct ProjectivePoint {
    HomogeneousTriple v{cplx(0.0), cplx(0.0), cplx(1.0)};
    bool on_D = false;             ///< x + y/delta = 0
    bool on_C = false;             ///< xy = z^2
    bool in_K_plus = false;        ///< real and xy - z^2 >= 0
    bool in_K_minus = false;       ///< real and xy - z^2 <= 0
    bool is_indeterminacy = false; ///< proportional to (1, -delta, 0)

    /// Normalizes and classifies. Throws DomainError for the zero triple.
    static ProjectivePoint make(const HomogeneousTriple& v, const ModelParams& params,
                                double flag_tol = 1e-12);
    static ProjectivePoint affine(const AffinePoint& p, const ModelParams& params)
    {
        return make({p.x, p.y, cplx(1.0)}, params);
    }
};

/// The indeterminacy point l = [1, -delta, 0].
HomogeneousTriple indeterminacy_point(const ModelParams& params);

struct ProjectiveImage {
    ProjectivePoint point;
    double distance_to_indeterminacy = 1.0; ///< of the argument
    bool near_indeterminacy = false;
};

/// f on P^2. Throws IndeterminacyError at l; flags arguments closer than
/// near_threshold to l.
ProjectiveImage R_homogeneous(const ProjectivePoint& P, const ModelParams& params,
                              double near_threshold = 1e-10);

/// Preimage of [x, y, 0] under the restriction of f to the line at infinity.
HomogeneousTriple infinity_preimage(const HomogeneousTriple& v, const ModelParams& params);

struct GreenConfig {
    int max_iter = 200;
    double escape_radius = 1e8;
    double convergence_tol = 1e-12;
    std::size_t log_limit = 32;       ///< iterates kept in OrbitSummary::iterates
    bool extended_recheck = true;     ///< long double rerun of borderline verdicts
};

struct OrbitSummary {
    std::vector<AffinePoint> iterates;   ///< first log_limit iterates, starting with p
    double green_estimate = 0.0;
    bool bounded = true;
    std::optional<int> escape_step;      ///< first n with ||f^n(p)|| > escape_radius
    double min_distance_to_indeterminacy = 1.0;
    double max_norm = 0.0;               ///< max ||f^n(p)|| over the bounded stretch
    int iterations = 0;
    bool converged = false;              ///< |G_{n+1} - G_n| fell below convergence_tol
    bool rechecked = false;              ///< verdict came from the extended-precision pass
};

/// Green function estimate G(p) = lim 2^-n log(1 + ||f^n(p)||), accumulated
/// in log space through normalized homogeneous coordinates so that escaping
/// iterates never overflow.
OrbitSummary green(const AffinePoint& p, const ModelParams& params, const GreenConfig& config = {});

struct AlgebraicInvariants {
    double r = 0.0;        ///< xy - z^2
    double p = 0.0;        ///< alpha (x + y/delta)
    double r_of_R = 0.0;   ///< r(R(X))
    double residual = 0.0; ///< |r(R(X)) - gamma p^2 r(X)|
    double scale = 0.0;    ///< magnitude of the terms entering the residual
};

AlgebraicInvariants algebraic_invariants(const std::array<double, 3>& X, const ModelParams& params);

/// Growth factor of |r| on normalized triples under one step of R:
/// |r(R(X)/|R(X)|)| = factor * |r(X/|X|)| with factor = gamma |X|^2 p(X)^2 / |R(X)|^2.
double normalized_cone_factor(const std::array<double, 3>& X, const ModelParams& params);

struct ConeReport {
    std::size_t invariance_samples = 0;
    std::size_t invariance_violations = 0;
    std::size_t phi_samples = 0;
    std::size_t phi_violations = 0;   ///< phi(lambda) for lambda <= 0 found outside K_-
    double worst_margin = 0.0;        ///< most negative signed margin seen (0 if none)
};

/// K+/K- invariance of sampled real triples under R, and K- membership of
/// curve points phi(lambda) = (a, d) supplied for lambda <= 0.
ConeReport cone_checks(std::span<const std::array<double, 3>> samples,
                       std::span<const std::array<double, 2>> phi_points_negative,
                       const ModelParams& params);

/// One entry of the orbit of the f-constant line D in log coordinates.
struct LogProjective {
    int sign_x = 1;
    int sign_y = 1;
    double log_x = 0.0; ///< log |x/z|
    double log_y = 0.0; ///< log |y/z|
};

/// Iterates 1..n_max of f applied to a point of D \ {l}. The first step uses
/// the full map; afterwards the orbit lies on C, where f acts as coordinate
/// squaring, and is continued exactly in log coordinates.
std::vector<LogProjective> orbit_of_D(const AffinePoint& d_point, int n_max, const ModelParams& params);

} // namespace sslab
