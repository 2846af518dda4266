#include "sslab/propagator.hpp"

#include "sslab/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace sslab {

namespace {

template <class T>
T horner(const std::vector<double>& coef, T mu)
{
    T acc(0.0);
    for (auto it = coef.rbegin(); it != coef.rend(); ++it)
        acc = acc * mu + T(*it);
    return acc;
}

template <class T>
std::array<T, 2> f_step(const std::array<T, 2>& p, double delta)
{
    const T s = p[0] + p[1] / delta;
    return {p[0] * s - T(1.0 / delta), T(delta) * p[1] * s - T(delta)};
}

template <class T>
double dist(const std::array<T, 2>& u, const std::array<T, 2>& v)
{
    return std::hypot(std::abs(u[0] - v[0]), std::abs(u[1] - v[1]));
}

template <class T>
double norm2(const std::array<T, 2>& u)
{
    return std::hypot(std::abs(u[0]), std::abs(u[1]));
}

} // namespace

Propagator::Propagator(const ModelParams& params, PropagatorOptions options)
    : params_(params), options_(options)
{
    if (options_.taylor_order < 1)
        throw DomainError("taylor_order must be at least 1");
    if (!(options_.eps0 > 0.0))
        throw DomainError("eps0 must be positive");
    const double a = params_.alpha, dl = params_.delta, g = params_.gamma;
    // Under the weight choice w1 = 1 - alpha the product factors tend to alpha (1 + 1/delta) = 1.
    if (std::abs(a * (1.0 + 1.0 / dl) - 1.0) > 1e-14)
        throw DomainError("alpha (1 + 1/delta) != 1: weights violate the translation-invariance hypothesis");

    const int q = options_.taylor_order;
    a_coef_.assign(q + 1, 0.0);
    d_coef_.assign(q + 1, 0.0);
    a_coef_[0] = d_coef_[0] = 1.0;
    // First order is the gamma-eigendirection of Df at (1,1); its scale comes
    // from the integral equation: a'(0) = int (1-x) dm, d'(0) = int x dm.
    a_coef_[1] = 1.0 - params_.M;
    d_coef_[1] = params_.M;
    std::vector<double> s_coef(q + 1);
    s_coef[0] = 1.0 + 1.0 / dl;
    s_coef[1] = a_coef_[1] + d_coef_[1] / dl;
    double gj = g;
    for (int j = 2; j <= q; ++j) {
        gj *= g;
        double P = 0.0, Q = 0.0;
        for (int i = 1; i < j; ++i) {
            P += a_coef_[i] * s_coef[j - i];
            Q += d_coef_[i] * s_coef[j - i];
        }
        // a_j (2 + 1/delta - g^j) + d_j / delta = -P
        // a_j delta + d_j (2 + delta - g^j)   = -delta Q
        const double m00 = 2.0 + 1.0 / dl - gj, m01 = 1.0 / dl;
        const double m10 = dl, m11 = 2.0 + dl - gj;
        const double det = m00 * m11 - m01 * m10;
        const double r0 = -P, r1 = -dl * Q;
        a_coef_[j] = (r0 * m11 - m01 * r1) / det;
        d_coef_[j] = (m00 * r1 - m10 * r0) / det;
        s_coef[j] = a_coef_[j] + d_coef_[j] / dl;
    }
    // log(h) with h = alpha * s, h_0 = 1:  j g_j = j h_j - sum_{i<j} i g_i h_{j-i}
    std::vector<double> h(q + 1);
    for (int j = 0; j <= q; ++j)
        h[j] = a * s_coef[j];
    log_s_coef_.assign(q + 1, 0.0);
    for (int j = 1; j <= q; ++j) {
        double acc = j * h[j];
        for (int i = 1; i < j; ++i)
            acc -= i * log_s_coef_[i] * h[j - i];
        log_s_coef_[j] = acc / j;
    }
}

int Propagator::seed_level_for(double abs_lambda, double eps0) const
{
    int n = 0;
    double r = abs_lambda;
    while (r > eps0) {
        r /= params_.gamma;
        ++n;
    }
    return n;
}

template <class T>
std::array<T, 2> Propagator::phi_raw(T lambda, double eps0, int* seed_level) const
{
    const int n = seed_level_for(std::abs(lambda), eps0);
    if (seed_level)
        *seed_level = n;
    const T mu = lambda / std::pow(params_.gamma, n);
    std::array<T, 2> p{horner(a_coef_, mu), horner(d_coef_, mu)};
    for (int k = 0; k < n; ++k)
        p = f_step(p, params_.delta);
    return p;
}

std::array<double, 2> Propagator::phi_fast(double lambda) const
{
    return phi_raw(lambda, options_.eps0, nullptr);
}

double Propagator::t_value(double lambda) const
{
    const auto p = phi_fast(lambda);
    return p[0] + p[1] / params_.delta;
}

template <class T>
PhiPointT<T> Propagator::phi_impl(T lambda) const
{
    PhiPointT<T> out;
    out.lambda = lambda;
    const auto p = phi_raw(lambda, options_.eps0, &out.seed_level);
    out.a = p[0];
    out.d = p[1];

    // Semiconjugacy defect with an independent seeding of phi(lambda/gamma).
    if (lambda != T(0.0)) {
        const double alt_eps = options_.eps0 / std::sqrt(params_.gamma);
        const auto prev = phi_raw(T(lambda / params_.gamma), alt_eps, nullptr);
        out.residual = dist(f_step(prev, params_.delta), p);
    }

    if (options_.estimate_error && out.seed_level > 0) {
        // Push a transverse perturbation of the seed through the same iteration.
        constexpr double eta = 1e-8;
        const T mu = lambda / std::pow(params_.gamma, out.seed_level);
        std::array<T, 2> q{horner(a_coef_, mu) * T(1.0 + eta), horner(d_coef_, mu) * T(1.0 - eta)};
        for (int k = 0; k < out.seed_level; ++k)
            q = f_step(q, params_.delta);
        const double amplification = dist(q, p) / eta;
        const double seed_error = 4.0 * std::numeric_limits<double>::epsilon() +
                                  std::pow(std::abs(mu), options_.taylor_order + 1);
        out.error_estimate = amplification * seed_error;
        out.precision_warning = out.error_estimate > options_.tol * (1.0 + norm2(p));
    }
    return out;
}

PhiPoint Propagator::phi(double lambda) const { return phi_impl(lambda); }
PhiPointC Propagator::phi(cplx lambda) const { return phi_impl(lambda); }

std::vector<std::array<double, 2>> Propagator::phi_orbit(double lambda, int count) const
{
    std::vector<std::array<double, 2>> out;
    if (count <= 0)
        return out;
    out.reserve(count);
    out.push_back(phi_fast(lambda));
    for (int k = 1; k < count; ++k)
        out.push_back(f_step(out.back(), params_.delta));
    return out;
}

template <class T>
PropagatorEntriesT<T> Propagator::entries_impl(T lambda) const
{
    PropagatorEntriesT<T> out;
    out.lambda = lambda;
    const double dl = params_.delta, al = params_.alpha;
    const int n = seed_level_for(std::abs(lambda), options_.eps0);
    const T mu = lambda / std::pow(params_.gamma, n);

    // b(lambda) = prod_{k>=1} alpha s(gamma^-k lambda). Factors with k > n are
    // summed in closed form: sum_k log(alpha s(gamma^-k mu)) = sum_j l_j mu^j / (gamma^j - 1).
    T log_tail(0.0);
    T mu_pow(1.0);
    T last(0.0);
    for (std::size_t j = 1; j < log_s_coef_.size(); ++j) {
        mu_pow *= mu;
        last = T(log_s_coef_[j]) * mu_pow / (std::pow(params_.gamma, static_cast<double>(j)) - 1.0);
        log_tail += last;
    }
    if (std::abs(last) > 1e-12 * (1.0 + std::abs(log_tail)))
        throw ConvergenceError("product tail series not converged; lower eps0 or raise taylor_order");
    const T tail = std::exp(log_tail);

    std::array<T, 2> p{horner(a_coef_, mu), horner(d_coef_, mu)};
    T b = tail;
    for (int k = 0; k < n; ++k) {
        // p = phi(gamma^{k-n} lambda), a factor of the product for k - n <= -1.
        b *= T(al) * (p[0] + p[1] / dl);
        p = f_step(p, dl);
    }
    out.a = p[0];
    out.d = p[1];
    out.b = b;
    out.c = lambda * b;
    out.truncation_level = n;
    return out;
}

PropagatorEntries Propagator::entries(double lambda) const { return entries_impl(lambda); }
PropagatorEntriesC Propagator::entries(cplx lambda) const { return entries_impl(lambda); }

Mat2<double> Propagator::gamma_n(double lambda, int n) const
{
    if (n < 0)
        throw DomainError("gamma_n needs n >= 0");
    const auto e = entries(lambda * std::pow(params_.gamma, n));
    const double an = std::pow(params_.alpha, n);
    return Mat2<double>::from(e.a, e.b / an, an * e.c, e.d);
}

TraceProduct Propagator::trace_product(double lambda, int n) const
{
    if (n < 0)
        throw DomainError("trace_product needs n >= 0");
    TraceProduct tp;
    tp.lambda = lambda;
    tp.n = n;
    const double sd = std::sqrt(params_.delta);
    for (const auto& p : phi_orbit(lambda, n))
        tp.value *= sd * p[0] + p[1] / sd;
    return tp;
}

Mat2<double> Propagator::tilde_gamma(double lambda, int n) const
{
    if (n < 0)
        throw DomainError("tilde_gamma needs n >= 0");
    const double sd = std::sqrt(params_.delta);
    const auto e = entries(lambda);
    const double pi = trace_product(lambda, n).value;
    const auto an = n == 0 ? std::array<double, 2>{e.a, e.d} : phi_orbit(lambda, n + 1).back();
    return Mat2<double>::from(sd * an[0], sd * e.b * pi, e.c * pi / sd, an[1] / sd);
}

Mat2<double> Propagator::tilde_gamma_by_conjugation(double lambda, int n) const
{
    const double sd = std::sqrt(params_.delta);
    const double sdn = std::pow(sd, n);
    const Mat2<double> g = gamma_n(lambda, n);
    return sd * (D(1.0 / params_.delta) * D(1.0 / sdn) * g * D(sdn));
}

} // namespace sslab
