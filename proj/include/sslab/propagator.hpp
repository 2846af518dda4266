#pragma once

#include "sslab/mat2.hpp"
#include "sslab/model.hpp"

#include <array>
#include <vector>

namespace sslab {

struct PropagatorOptions {
    double eps0 = 0.1;        ///< seed radius: phi is seeded at gamma^-n lambda with |.| <= eps0
    int taylor_order = 14;    ///< order of the seed expansion of (a, d) at 0
    double tol = 1e-9;        ///< precision-loss threshold for the perturbed-seed estimator
    bool estimate_error = true;
};

/// phi(lambda) = (a(lambda), d(lambda)), a point of the invariant curve of f.
template <class T>
struct PhiPointT {
    T lambda{};
    T a{};
    T d{};
    int seed_level = 0;          ///< number of forward steps of f applied to the seed
    double residual = 0.0;       ///< |f(phi'(lambda/gamma)) - phi(lambda)| with phi' seeded independently
    double error_estimate = 0.0; ///< perturbed-seed amplification times seed accuracy
    bool precision_warning = false;
};
using PhiPoint = PhiPointT<double>;
using PhiPointC = PhiPointT<cplx>;

/// The four entries of Gamma_lambda = Gamma_lambda(0, 1).
template <class T>
struct PropagatorEntriesT {
    T lambda{};
    T a{}, b{}, c{}, d{};
    int truncation_level = 0;    ///< explicit product factors before the analytic tail

    Mat2<T> matrix() const { return Mat2<T>::from(a, b, c, d); }
};
using PropagatorEntries = PropagatorEntriesT<double>;
using PropagatorEntriesC = PropagatorEntriesT<cplx>;

struct TraceProduct {
    double lambda = 0.0;
    int n = 0;
    double value = 1.0;          ///< prod_{k<n} (sqrt(delta) a(gamma^k l) + d(gamma^k l)/sqrt(delta))
};

/// Propagator of d/dm d/dx on I computed through the renormalization map.
///
/// Holds the Taylor coefficients of a and d at 0 (generated by coefficient
/// matching in f o phi = phi o gamma) and of log(alpha (a + d/delta)), which
/// closes the infinite product for b analytically. Immutable once built.
class Propagator {
public:
    explicit Propagator(const ModelParams& params, PropagatorOptions options = {});

    const ModelParams& params() const { return params_; }
    const PropagatorOptions& options() const { return options_; }
    const std::vector<double>& a_coefficients() const { return a_coef_; }
    const std::vector<double>& d_coefficients() const { return d_coef_; }

    PhiPoint phi(double lambda) const;
    PhiPointC phi(cplx lambda) const;

    /// (a, d) without residual or error estimation; the hot path for root searches.
    std::array<double, 2> phi_fast(double lambda) const;

    /// phi(gamma^k lambda) for k = 0 .. count-1.
    std::vector<std::array<double, 2>> phi_orbit(double lambda, int count) const;

    /// t(lambda) = a(lambda) + d(lambda)/delta; phi(lambda) lies on D iff t = 0.
    double t_value(double lambda) const;

    PropagatorEntries entries(double lambda) const;
    PropagatorEntriesC entries(cplx lambda) const;

    /// Gamma_<n>,lambda = Gamma_lambda(0, alpha^-n) via the scaling relation.
    Mat2<double> gamma_n(double lambda, int n) const;

    TraceProduct trace_product(double lambda, int n) const;

    /// Normalized propagator (28): entries sqrt(d) a_<n>, sqrt(d) b Pi_<n>, c Pi_<n>/sqrt(d), d_<n>/sqrt(d).
    Mat2<double> tilde_gamma(double lambda, int n) const;

    /// Same matrix through the conjugation sqrt(delta) D_delta^-1 D_sqrt(delta)^-n Gamma_<n> D_sqrt(delta)^n.
    Mat2<double> tilde_gamma_by_conjugation(double lambda, int n) const;

private:
    template <class T>
    PhiPointT<T> phi_impl(T lambda) const;
    template <class T>
    std::array<T, 2> phi_raw(T lambda, double eps0, int* seed_level) const;
    template <class T>
    PropagatorEntriesT<T> entries_impl(T lambda) const;
    int seed_level_for(double abs_lambda, double eps0) const;

    ModelParams params_;
    PropagatorOptions options_;
    std::vector<double> a_coef_;
    std::vector<double> d_coef_;
    std::vector<double> log_s_coef_; ///< series of log(alpha (a + d/delta)), zeroth term 0
};

/// D_beta = diag(1, beta).
inline Mat2<double> D(double beta) { return Mat2<double>::diag(1.0, beta); }

} // namespace sslab
