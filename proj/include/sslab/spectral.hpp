#pragma once

#include "sslab/propagator.hpp"
#include "sslab/renorm_map.hpp"
#include "sslab/string_oracle.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sslab {

struct RootSearchOptions {
    int points_per_octave = 64;  ///< initial geometric grid, ratio gamma^(1/points_per_octave)
    int max_doublings = 8;       ///< adaptive grid refinement per gamma-octave
    double grid_floor = 1e-3;    ///< |t| below this with no sign change triggers a tangency search
    double rel_tol = 1e-14;      ///< bracket width relative to |lambda|
};

/// Zeros of t(lambda / gamma), t = a + d / delta, in a window of R_-.
struct RootSet {
    ModelParams params;
    std::vector<double> roots;                          ///< lambda_1 > lambda_2 > ...
    std::vector<std::pair<double, double>> brackets;    ///< sign-change bracket per root
    double window_lo = 0.0;
    double window_hi = 0.0;
    double tol = 0.0;
    std::vector<std::string> warnings;                  ///< possible missed roots

    /// True when every root in [lo, hi] is known.
    bool covers(double lo, double hi) const { return window_lo <= lo && hi <= window_hi; }
};

/// No zero of t(lambda/gamma) has |lambda| < gamma, since a and d stay positive
/// on the unit disk; the search starts there.
RootSet find_S(const Propagator& prop, double lo, double hi, const RootSearchOptions& options = {});

struct EigenLabel {
    int k = 0;                   ///< 1-based index into the root set; 0 for the Neumann zero mode
    int p = 0;
    double value = 0.0;
};

/// {gamma^p lambda_k : p >= -level} in [lo, hi), ascending. For Neumann a
/// window with hi = 0 also holds the zero mode.
/// Throws PreconditionError when the root set does not reach gamma^level * lo.
std::vector<EigenLabel> enumerate_eigenvalues(const RootSet& roots, int level, double lo, double hi,
                                              Boundary boundary);

enum class IdsMethod { OracleInertia, LabelCount };

struct IdsEstimate {
    int level = 0;
    double lo = 0.0;             ///< half-open window [lo, hi)
    double hi = 0.0;
    std::size_t count_neumann = 0;
    std::size_t count_dirichlet = 0;
    double normalized_neumann = 0.0;   ///< count / 2^level
    double normalized_dirichlet = 0.0;
    IdsMethod method = IdsMethod::OracleInertia;
};

/// Level-n operators on I_<n>(omega) discretized at depth n + resolution.
class IdsOracle {
public:
    IdsOracle(const ModelParams& params, const BlowupPrefix& prefix, int resolution = 8,
              MassScheme scheme = MassScheme::Midpoint);

    int level() const { return level_; }
    std::size_t size() const { return neumann_.size(); }
    const TridiagonalOperator& neumann() const { return neumann_; }
    const TridiagonalOperator& dirichlet() const { return dirichlet_; }

    /// Counts in [lo, hi) with hi <= 0. The Neumann kernel is the constants, so
    /// the zero mode is accounted exactly instead of through a pivot at 0.
    IdsEstimate window(double lo, double hi) const;

private:
    std::size_t neumann_below(double x) const;
    std::size_t dirichlet_below(double x) const;

    int level_;
    TridiagonalOperator neumann_;
    TridiagonalOperator dirichlet_;
};

/// IDS of [lambda, 0) for each lambda.
std::vector<IdsEstimate> ids(const ModelParams& params, const BlowupPrefix& prefix, int level,
                             const std::vector<double>& lambdas, int resolution = 8);

struct LyapunovSample {
    double lambda = 0.0;
    double zeta = 0.0;
    OrbitSummary orbit;
};

/// zeta(lambda) = G(phi(lambda)).
LyapunovSample lyapunov(const Propagator& prop, double lambda, const GreenConfig& config = {});

enum class SpectralClass { InSupport, Gap, Undecided };
const char* to_string(SpectralClass c);

struct ClassifyOptions {
    GreenConfig green;
    double twin_offset = 1e-10;      ///< relative offset of the shadow orbit's lambda
    double divergence_tol = 1e-3;    ///< relative separation at which the shadow is lost
    bool delta_one_special_case = true;
};

struct Classification {
    SpectralClass verdict = SpectralClass::Undecided;
    std::optional<int> escape_step;
    std::optional<int> horizon;      ///< step at which the shadow orbit separated
    int iterations = 0;
    double max_norm = 0.0;
    bool rechecked = false;          ///< guard-band rerun at 4x max_iter
};

/// Orbit of phi(lambda) under f, shadowed by the orbit of phi(lambda (1 + twin_offset)).
///
/// Supp mu is a repeller of measure zero, so every floating-point lambda
/// eventually escapes; escapes only mean something while the two orbits still
/// agree. Gap: escape before separation. InSupport: bounded until separation
/// or max_iter. Undecided: still within a factor 10 of the escape radius
/// after a 4x max_iter rerun.
Classification classify(const Propagator& prop, double lambda, const ClassifyOptions& options = {});

/// Up to `count` points of an even grid over [lo, hi], scanned from hi downwards,
/// that classify InSupport and whose orbit phi(gamma^k lambda), k <= horizon,
/// stays within `radius`. Deterministic for fixed arguments.
std::vector<double> support_samples(const Propagator& prop, double lo, double hi, std::size_t count,
                                    int horizon, int grid = 4000, double radius = 10.0,
                                    const ClassifyOptions& options = {});

} // namespace sslab
