#pragma once

#include "sslab/mat2.hpp"
#include "sslab/propagator.hpp"
#include "sslab/spectral.hpp"
#include "sslab/string_oracle.hpp"

#include <vector>

namespace sslab {

/// sign * exp(log_abs); sign == 0 encodes zero.
struct LogValue {
    int sign = 1;
    double log_abs = 0.0;

    static LogValue from(double v);
    double value() const;
    LogValue operator*(const LogValue& o) const { return {sign * o.sign, log_abs + o.log_abs}; }
    LogValue squared() const { return {sign == 0 ? 0 : 1, 2.0 * log_abs}; }
};

/// Gluing coefficient b_n for the orbit of D: Neumann b_0 = -1/delta,
/// b_n = delta^-(2^n); Dirichlet b_0 = -1, b_n = delta^(2^n - 1).
LogValue extension_coeff(Boundary boundary, int n, const ModelParams& params);
std::vector<LogValue> extension_coeffs(Boundary boundary, int n_max, const ModelParams& params);

struct EigenfunctionOptions {
    int oracle_level = 12;       ///< depth of the base string on I
    MassScheme scheme = MassScheme::Midpoint;
    double junction_tol = 1e-8;
};

/// f_{k,p} on I_<N> for the blow-up (1, 1, ...): a string solution on I at
/// the refined eigenvalue, extended level by level with
/// f(y) = b_n f(delta (y - alpha^-n)) on [alpha^-n, alpha^-(n+1)].
struct EigenfunctionRep {
    EigenLabel label;
    Boundary boundary = Boundary::Neumann;
    double lambda = 0.0;          ///< lambda_k from the root set
    double lambda_string = 0.0;   ///< eigenvalue of the base string closest to lambda_k
    int level = 0;                ///< N: f_{k,p} is known on I_<N>
    std::vector<double> nodes;    ///< base string positions on I
    std::vector<double> values;   ///< base solution at the nodes
    std::vector<double> slopes;   ///< slope right of each node
    double initial_value = 0.0;   ///< f(0)
    double initial_slope = 0.0;   ///< f'(0)
    std::vector<LogValue> b;      ///< measured gluing coefficients b_0 .. b_{N+p-1}
    double junction_defect = 0.0; ///< relative boundary defect of the base piece at x = 1
    double alpha = 0.5;
    double delta = 1.0;

    /// Base solution f_k on I (piecewise linear between masses).
    double base(double x) const;
    /// f_{k,p}(x) for x in I_<N>, in log-magnitude form.
    LogValue evaluate_log(double x) const;
    double evaluate(double x) const { return evaluate_log(x).value(); }
};

EigenfunctionRep build_eigenfunction(const ModelParams& params, const RootSet& roots, EigenLabel label,
                                     Boundary boundary, int level, const EigenfunctionOptions& options = {});

enum class NormVerdict { SquareSummable, Divergent };
const char* to_string(NormVerdict v);

struct NormSeries {
    std::vector<double> log_norms;   ///< log ||f_{k,p,<n>}||^2, n = 0 .. N (up to a common constant)
    std::vector<double> ratios;      ///< 1 + delta b_{n+p}^2, n = 0 .. N-1 (may be +inf)
    std::vector<double> log_ratios;
    NormVerdict verdict = NormVerdict::Divergent;
    double c_delta = 0.0;            ///< prod_k (1 + delta b_k^2) over the theoretical b; +inf when divergent
};

NormSeries norm_series(const EigenfunctionRep& rep, const ModelParams& params, int N);

/// Squared norms of rep on I_<n>, n = 0 .. N, summed over the nodes of the
/// depth N + resolution string of I_<N>, divided level by level.
std::vector<double> quadrature_ratios(const EigenfunctionRep& rep, const ModelParams& params, int N,
                                      int resolution);

/// Full eigenbasis of the Neumann operator on I_<n> at depth n + resolution.
class FiniteLevelBasis {
public:
    FiniteLevelBasis(const ModelParams& params, int level, int resolution, std::uint64_t seed = 20240601);

    const DiscreteString& string() const { return string_; }
    const EigenSolveResult& eigen() const { return eigen_; }
    int level() const { return level_; }

    /// Index of the eigenvalue closest to lambda.
    std::size_t nearest(double lambda) const;

private:
    int level_;
    DiscreteString string_;
    EigenSolveResult eigen_;
};

struct ParsevalReport {
    double norm2 = 0.0;              ///< ||g||^2
    double expansion = 0.0;          ///< sum |<g, e>|^2 over the eigenbasis
    double residual = 0.0;
};

/// g sampled at the nodes of basis.string().
ParsevalReport parseval_check(const FiniteLevelBasis& basis, const std::vector<double>& g);

/// |<f, e>| / (||f|| ||e||) against the oracle eigenvector nearest gamma^p lambda_k.
double alignment(const FiniteLevelBasis& basis, const EigenfunctionRep& rep);

/// Sum of |<g, e>|^2 over eigenvectors whose nearest ladder label has p <= -n1, for n1 = 0 .. level.
std::vector<double> parseval_tail(const FiniteLevelBasis& basis, const std::vector<double>& g,
                                  const RootSet& roots);

struct QuadraticFormSample {
    int level = 0;
    double lambda = 0.0;
    Mat2<double> K;          ///< K_<n>(X) = X^T K X
    Mat2<double> K_tilde;    ///< K_<n>(D_sqrt(delta)^n X)
    Mat2<double> gamma;      ///< string propagator over I_<n>
};

/// K_<n>,lambda by summation over the depth n + resolution string of I_<n>.
QuadraticFormSample quadratic_form(const ModelParams& params, int n, double lambda, int resolution = 8);

/// Relative residual of K_<n+1>(X) = K_<n>(X) + delta K_<n>(D_delta^-1 Gamma_<n> X).
double recursion_residual(const QuadraticFormSample& kn, const QuadraticFormSample& kn1,
                          const ModelParams& params, const std::array<double, 2>& X);

/// Relative residual of the normalized recursion
/// K~_<n+1>(X) = K~_<n>(D X) + K~_<n>(G~_<n> D X), D = D_sqrt(delta).
double tilde_recursion_residual(const QuadraticFormSample& kn, const QuadraticFormSample& kn1,
                                const ModelParams& params, const std::array<double, 2>& X);

double quadratic_value(const Mat2<double>& K, const std::array<double, 2>& X);

struct Lemma45Result {
    bool holds = false;
    double lower = 0.0;          ///< sup K * ((1 - tr^2/4) / |G|^2)^2
    double upper = 0.0;          ///< sup K * (1 + |G|^2)
    double min_value = 0.0;      ///< min over unit Z of K(Z) + K(G Z)
    double max_value = 0.0;
    double slack = 0.0;          ///< min(min_value - lower, upper - max_value) / sup K
};

/// Exact extremes of K(Z) + K(G Z) over the unit circle, compared with both bounds.
/// Throws PreconditionError unless det G = 1 (1e-10) and |tr G| < 2.
Lemma45Result lemma45_check(const Mat2<double>& K, const Mat2<double>& G);

struct TraceSubsequence {
    std::vector<int> indices;        ///< n with |tr G~_<n-1>| <= 2/sqrt(3)
    std::vector<double> traces;      ///< tr G~_<m>, m = 0 .. N-1
    std::vector<double> pi;          ///< Pi_<n>, n = 0 .. N
    double running_max_pi = 0.0;
    double min_abs_trace = 0.0;
    double c1 = 0.0;                 ///< max orbit norm of phi(gamma^m lambda), m <= N
    double c2 = 0.0;                 ///< sqrt(1 + C1^2) / sqrt(|b c|)
    bool empty_warning = false;
};

/// Throws PreconditionError unless classify(lambda) is InSupport.
TraceSubsequence trace_subsequence(const Propagator& prop, double lambda, int N,
                                   const ClassifyOptions& options = {});

/// K_<m> for m = 0 .. n from the string quadrature of K_<0> and the recursion
/// with Gamma_<m> from the renormalization propagator.
std::vector<Mat2<double>> form_ladder(const Propagator& prop, double lambda, int n, int resolution = 12);

/// Extremes over X of K_<n>(X) / (delta K_<n>(D_delta^-1 Gamma_<n> X)), the
/// energy ratio between I_<n> and I_<n+1> \ I_<n>.
std::array<double, 2> energy_ratio_range(const Mat2<double>& Kn, const Mat2<double>& gamma_n,
                                         const ModelParams& params);

/// Condition number sigma_max / sigma_min of G~_<n>.
double tilde_condition(const Propagator& prop, double lambda, int n);

} // namespace sslab
