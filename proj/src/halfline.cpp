#include "sslab/halfline.hpp"

#include "sslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sslab {

LogValue LogValue::from(double v)
{
    if (v == 0.0)
        return {0, -std::numeric_limits<double>::infinity()};
    return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

double LogValue::value() const
{
    return sign == 0 ? 0.0 : sign * std::exp(log_abs);
}

LogValue extension_coeff(Boundary boundary, int n, const ModelParams& params)
{
    if (n < 0)
        throw DomainError("extension_coeff needs n >= 0");
    const double ld = std::log(params.delta);
    if (boundary == Boundary::Neumann) {
        if (n == 0)
            return {-1, -ld};
        return {1, -std::ldexp(ld, n)};
    }
    if (n == 0)
        return {-1, 0.0};
    return {1, (std::ldexp(1.0, n) - 1.0) * ld};
}

std::vector<LogValue> extension_coeffs(Boundary boundary, int n_max, const ModelParams& params)
{
    std::vector<LogValue> out;
    for (int n = 0; n <= n_max; ++n)
        out.push_back(extension_coeff(boundary, n, params));
    return out;
}

double EigenfunctionRep::base(double x) const
{
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.begin())
        return initial_value + initial_slope * x;
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    return values[i] + slopes[i] * (x - nodes[i]);
}

LogValue EigenfunctionRep::evaluate_log(double x) const
{
    const double top = std::pow(alpha, -static_cast<double>(level));
    if (x < 0.0 || x > top * (1.0 + 1e-12))
        throw DomainError("evaluation point outside I_<N>");
    double y = x * std::pow(alpha, -static_cast<double>(label.p));
    LogValue coef{1, 0.0};
    const double inv_log = -1.0 / std::log(alpha);
    while (y > 1.0) {
        // y in (alpha^-j, alpha^-(j+1)]
        int j = static_cast<int>(std::floor(std::log(y) * inv_log));
        double lo = std::pow(alpha, -static_cast<double>(j));
        if (lo >= y) {
            --j;
            lo = std::pow(alpha, -static_cast<double>(j));
        }
        if (j < 0)
            break;
        if (static_cast<std::size_t>(j) >= b.size())
            throw DomainError("evaluation point beyond the glued levels");
        coef = coef * b[static_cast<std::size_t>(j)];
        y = delta * (y - lo);
    }
    return coef * LogValue::from(base(std::min(y, 1.0)));
}

namespace {

struct BaseSolution {
    std::vector<double> values, slopes;
    double f1 = 0.0, g1 = 0.0;   // f(1), f'(1)
};

BaseSolution walk(const DiscreteString& s, double lambda, double f0, double g0)
{
    BaseSolution out;
    out.values.reserve(s.size());
    out.slopes.reserve(s.size());
    double f = f0, g = g0, x = s.left;
    for (std::size_t i = 0; i < s.size(); ++i) {
        f += (s.positions[i] - x) * g;
        g += lambda * s.masses[i] * f;
        x = s.positions[i];
        out.values.push_back(f);
        out.slopes.push_back(g);
    }
    out.f1 = f + (s.right - x) * g;
    out.g1 = g;
    return out;
}

} // namespace

EigenfunctionRep build_eigenfunction(const ModelParams& params, const RootSet& roots, EigenLabel label,
                                     Boundary boundary, int level, const EigenfunctionOptions& options)
{
    if (label.k < 1 || static_cast<std::size_t>(label.k) > roots.roots.size())
        throw DomainError("eigenfunction label k outside the root set");
    if (level < 0 || level + label.p < 0)
        throw DomainError("eigenfunction needs level >= 0 and level + p >= 0");
    EigenfunctionRep rep;
    rep.label = label;
    rep.label.value = roots.roots[static_cast<std::size_t>(label.k - 1)] * std::pow(params.gamma, label.p);
    rep.boundary = boundary;
    rep.level = level;
    rep.alpha = params.alpha;
    rep.delta = params.delta;
    rep.lambda = roots.roots[static_cast<std::size_t>(label.k - 1)];

    const DiscreteString s = discretize(params, BlowupPrefix{}, options.oracle_level, options.scheme);
    const bool neu = boundary == Boundary::Neumann;
    rep.initial_value = neu ? 1.0 : 0.0;
    rep.initial_slope = neu ? 0.0 : 1.0;
    // Junction condition at x = 1: f'(1) = 0 (Neumann data) or f(1) = 0 (Dirichlet data).
    auto defect = [&](double l) {
        const auto m = propagate(s, l);
        return neu ? m(1, 0) : m(0, 1);
    };

    double lo = 0.0, hi = 0.0, dlo = 0.0;
    bool found = false;
    for (double w = 1e-4; w <= 0.1 && !found; w *= 2.0) {
        lo = rep.lambda * (1.0 + w);
        hi = rep.lambda * (1.0 - w);
        dlo = defect(lo);
        found = (dlo > 0.0) != (defect(hi) > 0.0);
    }
    if (!found)
        throw ConvergenceError("no string eigenvalue bracketed near lambda_k");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double dm = defect(mid);
        if ((dm > 0.0) == (dlo > 0.0)) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
    }
    rep.lambda_string = std::abs(defect(lo)) < std::abs(defect(hi)) ? lo : hi;

    const BaseSolution sol = walk(s, rep.lambda_string, rep.initial_value, rep.initial_slope);
    rep.nodes = s.positions;
    rep.values = sol.values;
    rep.slopes = sol.slopes;
    double vmax = std::abs(rep.initial_value), smax = std::abs(rep.initial_slope);
    for (std::size_t i = 0; i < sol.values.size(); ++i) {
        vmax = std::max(vmax, std::abs(sol.values[i]));
        smax = std::max(smax, std::abs(sol.slopes[i]));
    }
    rep.junction_defect = neu ? std::abs(sol.g1) / smax : std::abs(sol.f1) / vmax;
    if (rep.junction_defect > options.junction_tol)
        throw ConvergenceError("base piece junction defect above tolerance");

    LogValue b0 = LogValue::from(neu ? sol.f1 : sol.g1 / params.delta);
    const double b0_theory = extension_coeff(boundary, 0, params).value();
    if (std::abs(b0.value() - b0_theory) > 5e-2 * std::abs(b0_theory))
        throw ConvergenceError("base piece boundary value far from the orbit-of-D prediction");

    const int count = level + label.p;
    const LogValue ld = LogValue::from(params.delta);
    for (int n = 0; n < count; ++n) {
        if (n == 0)
            rep.b.push_back(b0);
        else
            rep.b.push_back(neu ? rep.b.back().squared() : ld * rep.b.back().squared());
    }
    return rep;
}

const char* to_string(NormVerdict v)
{
    return v == NormVerdict::SquareSummable ? "SquareSummable" : "Divergent";
}

namespace {

// log(1 + delta b^2) from log-magnitude data.
double log_ratio(const LogValue& b, double log_delta)
{
    if (b.sign == 0)
        return 0.0;
    const double t = log_delta + 2.0 * b.log_abs;
    return t > 30.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Sums log(1 + delta b_n^2) along b_n = s * b_{n-1}^2 until the terms vanish
// (convergent) or 400 levels pass without that happening (divergent).
std::pair<bool, double> ladder_sum(LogValue b, double log_scale, double log_delta)
{
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
        const double term = log_ratio(b, log_delta);
        sum += term;
        if (term < 1e-300 || (log_delta + 2.0 * b.log_abs) < -745.0)
            return {true, sum};
        if (sum > 1e300)
            return {false, std::numeric_limits<double>::infinity()};
        b = LogValue{1, 2.0 * b.log_abs + log_scale};
    }
    return {false, std::numeric_limits<double>::infinity()};
}

} // namespace

NormSeries norm_series(const EigenfunctionRep& rep, const ModelParams& params, int N)
{
    if (N < 0 || N > rep.level)
        throw DomainError("norm_series level outside the built representation");
    NormSeries ns;
    const double ld = std::log(params.delta);
    const bool neu = rep.boundary == Boundary::Neumann;
    const int p = rep.label.p;
    const int first = std::max(0, -p);

    // log ||f_k||^2 on I_<j>, j = first + p
    double log_norm = 0.0;
    {
        const DiscreteString s = discretize(params, BlowupPrefix{}, static_cast<int>(std::log2(rep.nodes.size())));
        double sum = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double v = rep.base(s.positions[i]);
            sum += s.masses[i] * v * v;
        }
        log_norm = std::log(sum);
        for (int j = 0; j < first + p; ++j)
            log_norm += log_ratio(rep.b[static_cast<std::size_t>(j)], ld);
    }
    for (int n = first; n <= N; ++n) {
        ns.log_norms.push_back(log_norm);
        if (n == N)
            break;
        const LogValue& bn = rep.b[static_cast<std::size_t>(n + p)];
        const double lr = log_ratio(bn, ld);
        ns.log_ratios.push_back(lr);
        ns.ratios.push_back(std::exp(lr));
        log_norm += lr;
    }

    const double log_scale = neu ? 0.0 : ld;
    const LogValue b0 = rep.b.empty() ? extension_coeff(rep.boundary, 0, params) : rep.b.front();
    // |c_0| = 1 (c_n = s b_n) is the fixed point of c -> c^2; within rounding of it the
    // product never converges.
    const bool borderline = std::abs(b0.log_abs + log_scale) < 1e-8;
    ns.verdict = !borderline && ladder_sum(b0, log_scale, ld).first ? NormVerdict::SquareSummable
                                                                    : NormVerdict::Divergent;
    const auto [conv, total] = ladder_sum(extension_coeff(rep.boundary, 0, params), log_scale, ld);
    ns.c_delta = conv && !borderline ? std::exp(total) : std::numeric_limits<double>::infinity();
    return ns;
}

std::vector<double> quadrature_ratios(const EigenfunctionRep& rep, const ModelParams& params, int N,
                                      int resolution)
{
    if (N < 0 || N > rep.level)
        throw DomainError("quadrature level outside the built representation");
    const DiscreteString s = discretize(params, BlowupPrefix::all_ones(static_cast<std::size_t>(N)), N + resolution);
    const int first = std::max(0, -rep.label.p);
    std::vector<double> partial(static_cast<std::size_t>(N + 1), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.positions[i];
        const double v = rep.evaluate(x);
        // smallest level n with x in I_<n>
        int n = 0;
        while (n < N && x > std::pow(params.alpha, -static_cast<double>(n)))
            ++n;
        partial[static_cast<std::size_t>(n)] += s.masses[i] * v * v;
    }
    for (int n = 1; n <= N; ++n)
        partial[static_cast<std::size_t>(n)] += partial[static_cast<std::size_t>(n - 1)];
    std::vector<double> ratios;
    for (int n = first; n < N; ++n)
        ratios.push_back(partial[static_cast<std::size_t>(n + 1)] / partial[static_cast<std::size_t>(n)]);
    return ratios;
}

FiniteLevelBasis::FiniteLevelBasis(const ModelParams& params, int level, int resolution, std::uint64_t seed)
    : level_(level),
      string_(discretize(params, BlowupPrefix::all_ones(static_cast<std::size_t>(level)), level + resolution))
{
    const TridiagonalOperator op(string_, Boundary::Neumann);
    const auto [lo, hi] = op.gershgorin();
    EigenSolveOptions o;
    o.vectors = true;
    o.seed = seed;
    o.tol = 1e-13 * std::max(1.0, -lo);
    eigen_ = eigen_solve(op, lo - 1.0, std::max(hi, 0.0) + 1.0, o);
    if (eigen_.values.size() != string_.size())
        throw ConvergenceError("finite-level eigenbasis is incomplete");
}

std::size_t FiniteLevelBasis::nearest(double lambda) const
{
    const auto& v = eigen_.values;
    const auto it = std::lower_bound(v.begin(), v.end(), lambda);
    if (it == v.begin())
        return 0;
    if (it == v.end())
        return v.size() - 1;
    const std::size_t i = static_cast<std::size_t>(it - v.begin());
    return (lambda - v[i - 1] < v[i] - lambda) ? i - 1 : i;
}

ParsevalReport parseval_check(const FiniteLevelBasis& basis, const std::vector<double>& g)
{
    const auto& w = basis.string().masses;
    if (g.size() != w.size())
        throw DomainError("g must be sampled at the basis nodes");
    ParsevalReport r;
    r.norm2 = mass_inner(w, g, g);
    for (const auto& e : basis.eigen().vectors) {
        const double c = mass_inner(w, g, e);
        r.expansion += c * c;
    }
    r.residual = std::abs(r.norm2 - r.expansion);
    return r;
}

double alignment(const FiniteLevelBasis& basis, const EigenfunctionRep& rep)
{
    const auto& s = basis.string();
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        f[i] = rep.evaluate(s.positions[i]);
    const auto& e = basis.eigen().vectors[basis.nearest(rep.label.value)];
    const double fe = mass_inner(s.masses, f, e);
    return std::abs(fe) / std::sqrt(mass_inner(s.masses, f, f) * mass_inner(s.masses, e, e));
}

std::vector<double> parseval_tail(const FiniteLevelBasis& basis, const std::vector<double>& g,
                                  const RootSet& roots)
{
    const auto& s = basis.string();
    const auto& vals = basis.eigen().values;
    const int n = basis.level();
    std::vector<double> by_p(static_cast<std::size_t>(n + 1), 0.0); // index -p
    const double g_ = roots.params.gamma;
    for (std::size_t j = 0; j < vals.size(); ++j) {
        if (vals[j] >= 0.0 || vals[j] > -1e-9 * std::abs(vals.front()))
            continue;
        // p of the nearest ladder point gamma^p lambda_k, p >= -n
        int best_p = 0;
        double best = std::numeric_limits<double>::infinity();
        for (double lk : roots.roots) {
            const double p_real = std::log(vals[j] / lk) / std::log(g_);
            for (int p : {static_cast<int>(std::floor(p_real)), static_cast<int>(std::ceil(p_real))}) {
                if (p < -n)
                    continue;
                const double d = std::abs(vals[j] - lk * std::pow(g_, p));
                if (d < best) {
                    best = d;
                    best_p = p;
                }
            }
        }
        if (best_p <= 0) {
            const double c = mass_inner(s.masses, g, basis.eigen().vectors[j]);
            by_p[static_cast<std::size_t>(-best_p)] += c * c;
        }
    }
    std::vector<double> tail(static_cast<std::size_t>(n + 1), 0.0);
    double acc = 0.0;
    for (int q = n; q >= 0; --q) {
        acc += by_p[static_cast<std::size_t>(q)];
        tail[static_cast<std::size_t>(q)] = acc;
    }
    return tail;
}

QuadraticFormSample quadratic_form(const ModelParams& params, int n, double lambda, int resolution)
{
    if (n < 0 || resolution < 0)
        throw DomainError("quadratic_form needs n >= 0 and resolution >= 0");
    const DiscreteString s = discretize(params, BlowupPrefix::all_ones(static_cast<std::size_t>(n)), n + resolution);
    double f = 1.0, fp = 0.0, g = 0.0, gp = 1.0, x = s.left;
    double kff = 0.0, kfg = 0.0, kgg = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double ell = s.positions[i] - x;
        f += ell * fp;
        g += ell * gp;
        const double m = s.masses[i];
        kff += m * f * f;
        kfg += m * f * g;
        kgg += m * g * g;
        fp += lambda * m * f;
        gp += lambda * m * g;
        x = s.positions[i];
    }
    const double ell = s.right - x;
    f += ell * fp;
    g += ell * gp;

    QuadraticFormSample q;
    q.level = n;
    q.lambda = lambda;
    q.K = Mat2<double>::from(kff, kfg, kfg, kgg);
    q.gamma = Mat2<double>::from(f, g, fp, gp);
    const Mat2<double> Dn = D(std::pow(params.delta, 0.5 * n));
    q.K_tilde = Dn.transpose() * q.K * Dn;
    return q;
}

double quadratic_value(const Mat2<double>& K, const std::array<double, 2>& X)
{
    return K(0, 0) * X[0] * X[0] + 2.0 * K(0, 1) * X[0] * X[1] + K(1, 1) * X[1] * X[1];
}

double recursion_residual(const QuadraticFormSample& kn, const QuadraticFormSample& kn1,
                          const ModelParams& params, const std::array<double, 2>& X)
{
    if (kn1.level != kn.level + 1)
        throw LevelMismatchError("recursion needs consecutive levels");
    const Mat2<double> B = D(1.0 / params.delta) * kn.gamma;
    const double lhs = quadratic_value(kn1.K, X);
    const double rhs = quadratic_value(kn.K, X) + params.delta * quadratic_value(kn.K, B.apply(X));
    return std::abs(lhs - rhs) / std::abs(lhs);
}

double tilde_recursion_residual(const QuadraticFormSample& kn, const QuadraticFormSample& kn1,
                                const ModelParams& params, const std::array<double, 2>& X)
{
    if (kn1.level != kn.level + 1)
        throw LevelMismatchError("recursion needs consecutive levels");
    const double sd = std::sqrt(params.delta);
    const double sdn = std::pow(sd, kn.level);
    const Mat2<double> gt = sd * (D(1.0 / params.delta) * D(1.0 / sdn) * kn.gamma * D(sdn));
    const auto DX = D(sd).apply(X);
    const double lhs = quadratic_value(kn1.K_tilde, X);
    const double rhs = quadratic_value(kn.K_tilde, DX) + quadratic_value(kn.K_tilde, gt.apply(DX));
    return std::abs(lhs - rhs) / std::abs(lhs);
}

Lemma45Result lemma45_check(const Mat2<double>& K, const Mat2<double>& G)
{
    if (std::abs(G.det() - 1.0) > 1e-10)
        throw PreconditionError("lemma45_check needs det G = 1");
    const double tr = G.trace();
    if (!(std::abs(tr) < 2.0))
        throw PreconditionError("lemma45_check needs |tr G| < 2");
    const auto ke = sym_eigenvalues(K);
    if (!(ke[0] > 0.0))
        throw PreconditionError("lemma45_check needs a positive definite K");
    Lemma45Result r;
    const double sup_k = ke[1];
    const double g2 = G.frobenius2();
    const double factor = (1.0 - tr * tr / 4.0) / g2;
    r.lower = sup_k * factor * factor;
    r.upper = sup_k * (1.0 + g2);
    const auto se = sym_eigenvalues(K + G.transpose() * K * G);
    r.min_value = se[0];
    r.max_value = se[1];
    r.slack = std::min(r.min_value - r.lower, r.upper - r.max_value) / sup_k;
    r.holds = r.slack >= -1e-12;
    return r;
}

TraceSubsequence trace_subsequence(const Propagator& prop, double lambda, int N, const ClassifyOptions& options)
{
    if (N < 1)
        throw DomainError("trace_subsequence needs N >= 1");
    if (classify(prop, lambda, options).verdict != SpectralClass::InSupport)
        throw PreconditionError("trace_subsequence needs lambda classified InSupport");
    const double sd = std::sqrt(prop.params().delta);
    const auto orbit = prop.phi_orbit(lambda, N + 1);
    TraceSubsequence ts;
    ts.pi.push_back(1.0);
    ts.min_abs_trace = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= N; ++m) {
        const auto& p = orbit[static_cast<std::size_t>(m)];
        ts.c1 = std::max(ts.c1, std::hypot(p[0], p[1]));
        if (m == N)
            break;
        const double t = sd * p[0] + p[1] / sd;
        ts.traces.push_back(t);
        ts.pi.push_back(ts.pi.back() * t);
        ts.running_max_pi = std::max(ts.running_max_pi, std::abs(ts.pi.back()));
        ts.min_abs_trace = std::min(ts.min_abs_trace, std::abs(t));
        if (std::abs(t) <= 2.0 / std::sqrt(3.0))
            ts.indices.push_back(m + 1);
    }
    const auto e = prop.entries(lambda);
    ts.c2 = std::sqrt(1.0 + ts.c1 * ts.c1) / std::sqrt(std::abs(e.b * e.c));
    ts.empty_warning = ts.indices.empty();
    return ts;
}

std::vector<Mat2<double>> form_ladder(const Propagator& prop, double lambda, int n, int resolution)
{
    const ModelParams& params = prop.params();
    std::vector<Mat2<double>> ks{quadratic_form(params, 0, lambda, resolution).K};
    for (int m = 0; m < n; ++m) {
        const Mat2<double> B = D(1.0 / params.delta) * prop.gamma_n(lambda, m);
        ks.push_back(ks.back() + params.delta * (B.transpose() * ks.back() * B));
    }
    return ks;
}

std::array<double, 2> energy_ratio_range(const Mat2<double>& Kn, const Mat2<double>& gamma_n,
                                         const ModelParams& params)
{
    const Mat2<double> B = D(1.0 / params.delta) * gamma_n;
    const Mat2<double> L = params.delta * (B.transpose() * Kn * B);
    // det(K - r L) = 0
    const double qa = L.det();
    const double qb = -(Kn(0, 0) * L(1, 1) + Kn(1, 1) * L(0, 0) - 2.0 * Kn(0, 1) * L(0, 1));
    const double qc = Kn.det();
    const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
    const double q = -0.5 * (qb + std::copysign(disc, qb));
    double r1 = q / qa, r2 = qc / q;
    if (r1 > r2)
        std::swap(r1, r2);
    return {r1, r2};
}

double tilde_condition(const Propagator& prop, double lambda, int n)
{
    const Mat2<double> g = prop.tilde_gamma(lambda, n);
    const double f = g.frobenius2();
    const double det = std::abs(g.det());
    const double smax2 = 0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * det * det)));
    return smax2 / det;
}

} // namespace sslab
