#pragma once

#include "sslab/mat2.hpp"
#include "sslab/model.hpp"

#include <cstdint>
#include <vector>

namespace sslab {

enum class MassScheme { Midpoint, LeftEndpoint, Barycenter };
enum class Boundary { Neumann, Dirichlet };

const char* to_string(MassScheme s);
const char* to_string(Boundary b);

/// Point-mass approximation of m_<n> restricted to I_<n>(omega).
struct DiscreteString {
    std::vector<double> positions;
    std::vector<double> masses;
    double left = 0.0;
    double right = 1.0;
    int level = 0;               ///< refinement depth: 2^level cells
    std::size_t blowup_length = 0;

    std::size_t size() const { return positions.size(); }
    double total_mass() const;
};

/// One mass per level-`level` subcell of I_<n>(omega), n = prefix length.
/// Cells are Psi_omega^-1(Psi_w(I)) with |w| = level; at level = n the cells
/// of I_<n> are copies of I itself.
DiscreteString discretize(const ModelParams& params, const BlowupPrefix& prefix, int level,
                          MassScheme scheme = MassScheme::Midpoint);

/// Transfer matrix of (f, f') from s to t: gaps act by [[1, l], [0, 1]],
/// masses in (s, t] by [[1, 0], [lambda w, 1]].
Mat2<double> propagate(const DiscreteString& string, double lambda, double s, double t);
Mat2<cplx> propagate(const DiscreteString& string, cplx lambda, double s, double t);

/// Propagator over the whole domain of the string.
Mat2<double> propagate(const DiscreteString& string, double lambda);
Mat2<cplx> propagate(const DiscreteString& string, cplx lambda);

/// The operator d/dm d/dx on the string, stored in the symmetrized form
/// W^{1/2} A W^{-1/2} (W = diag(masses)), which is a symmetric tridiagonal matrix.
class TridiagonalOperator {
public:
    TridiagonalOperator(const DiscreteString& string, Boundary boundary);

    std::size_t size() const { return diag_.size(); }
    Boundary boundary() const { return boundary_; }
    const std::vector<double>& diagonal() const { return diag_; }
    const std::vector<double>& off_diagonal() const { return off_; }
    const std::vector<double>& masses() const { return masses_; }

    /// Row i of the unsymmetrized operator applied to nodal values f.
    std::vector<double> apply(const std::vector<double>& f) const;

    /// Interval [lo, hi] containing the whole spectrum.
    std::pair<double, double> gershgorin() const;
    /// Max-row-sum norm of the symmetrized matrix.
    double norm_inf() const;

private:
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> masses_;
    std::vector<double> sub_unsym_;   ///< A_{i,i-1}
    std::vector<double> sup_unsym_;   ///< A_{i,i+1}
    Boundary boundary_;
};

TridiagonalOperator build_operator(const DiscreteString& string, Boundary boundary);

struct EigenCount {
    std::size_t count = 0;       ///< eigenvalues strictly below lambda_used
    double lambda_used = 0.0;
    int jitters = 0;             ///< number of singular-pivot shifts applied
};

/// Number of eigenvalues strictly below lambda from the LDL^T inertia of S - lambda.
/// A pivot of magnitude below 1e-300 shifts lambda by 1e-9 (1 + |lambda|) and restarts.
EigenCount eigen_count_detail(const TridiagonalOperator& op, double lambda);
std::size_t eigen_count(const TridiagonalOperator& op, double lambda);

struct EigenSolveOptions {
    double tol = 1e-10;          ///< absolute bisection tolerance on eigenvalues
    bool vectors = false;
    int max_iter = 50;           ///< inverse iteration steps per eigenvector
    double residual_tol = 1e-10; ///< relative to ||S||
    std::uint64_t seed = 20240601;
};

struct EigenSolveResult {
    std::vector<double> values;                  ///< ascending
    std::vector<std::vector<double>> vectors;    ///< nodal values, mass-orthonormal
    std::vector<bool> converged;                 ///< per eigenvector
    std::vector<double> residuals;               ///< relative residual per eigenvector
    bool all_converged() const;
};

/// Every eigenvalue in the half-open window [lo, hi), by bisection on eigen_count.
EigenSolveResult eigen_solve(const TridiagonalOperator& op, double lo, double hi,
                             const EigenSolveOptions& options = {});

/// Mass-weighted inner product sum_i m_i f_i g_i.
double mass_inner(const std::vector<double>& masses, const std::vector<double>& f,
                  const std::vector<double>& g);

} // namespace sslab
