#include "sslab/spectral.hpp"

#include "sslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sslab {

namespace {

struct Bracketer {
    const Propagator& prop;
    double gamma;

    // t(lambda / gamma) at lambda = -x.
    double t_at(double x) const { return prop.t_value(-x / gamma); }

    // Shrinks a sign-change bracket [x0, x1]; returns the final bracket.
    std::pair<double, double> bisect(double x0, double t0, double x1, double rel_tol) const
    {
        for (int it = 0; it < 200 && x1 - x0 > rel_tol * x1; ++it) {
            const double xm = 0.5 * (x0 + x1);
            if (xm <= x0 || xm >= x1)
                break;
            const double tm = t_at(xm);
            if (tm == 0.0)
                return {xm, xm};
            if ((tm > 0.0) == (t0 > 0.0)) {
                x0 = xm;
                t0 = tm;
            } else {
                x1 = xm;
            }
        }
        return {x0, x1};
    }

    // Minimizes s * t over [x0, x1]; returns (argmin, value of t there).
    std::pair<double, double> golden(double x0, double x1, double s) const
    {
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = x0, b = x1;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = s * t_at(c), fd = s * t_at(d);
        for (int it = 0; it < 80 && b - a > 1e-15 * b; ++it) {
            if (fc < 0.0 || fd < 0.0)
                break;
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = s * t_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = s * t_at(d);
            }
        }
        return fc < fd ? std::pair{c, s * fc} : std::pair{d, s * fd};
    }
};

std::size_t sign_changes(const std::vector<double>& t)
{
    std::size_t c = 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if ((t[i] > 0.0) != (t[i + 1] > 0.0))
            ++c;
    return c;
}

} // namespace

RootSet find_S(const Propagator& prop, double lo, double hi, const RootSearchOptions& options)
{
    if (!(lo < hi) || hi > 0.0)
        throw DomainError("find_S needs a window lo < hi <= 0");
    const double gamma = prop.params().gamma;
    RootSet rs;
    rs.params = prop.params();
    rs.window_lo = lo;
    rs.window_hi = hi;
    const Bracketer br{prop, gamma};

    const double x_begin = std::max(gamma, -hi);
    const double x_end = -lo;
    std::vector<std::pair<double, double>> found; // final brackets in x = -lambda

    // Octaves [gamma^j, gamma^(j+1)] clipped to the search range.
    double oct_lo = x_begin;
    while (oct_lo < x_end) {
        const double j = std::floor(std::log(oct_lo) / std::log(gamma) + 1e-12);
        double oct_hi = std::min(x_end, std::pow(gamma, j + 1.0));
        if (oct_hi <= oct_lo * (1.0 + 1e-15))
            oct_hi = std::min(x_end, oct_lo * gamma);
        const double span = std::log(oct_hi / oct_lo) / std::log(gamma);

        int npts = std::max(2, static_cast<int>(std::ceil(options.points_per_octave * span)));
        std::vector<double> xs, ts;
        std::size_t prev_changes = 0;
        for (int dbl = 0;; ++dbl) {
            xs.resize(npts + 1);
            ts.resize(npts + 1);
            const double ratio = std::pow(oct_hi / oct_lo, 1.0 / npts);
            for (int i = 0; i <= npts; ++i) {
                xs[i] = i == npts ? oct_hi : oct_lo * std::pow(ratio, i);
                ts[i] = br.t_at(xs[i]);
            }
            const std::size_t c = sign_changes(ts);
            const bool stable = dbl > 0 && c == prev_changes;
            const bool dense = static_cast<std::size_t>(npts) >= 8 * c;
            if ((stable && dense) || dbl >= options.max_doublings)
                break;
            prev_changes = c;
            npts *= 2;
        }

        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const bool change = (ts[i] > 0.0) != (ts[i + 1] > 0.0);
            if (change) {
                found.push_back(br.bisect(xs[i], ts[i], xs[i + 1], options.rel_tol));
                continue;
            }
            // A dip of |t| toward zero between two same-sign samples may hide a root pair.
            const double s = ts[i] > 0.0 ? 1.0 : -1.0;
            const bool left_falls = i == 0 || s * ts[i - 1] > s * ts[i];
            const bool right_rises = i + 2 >= xs.size() || s * ts[i + 2] > s * ts[i + 1];
            if (!(left_falls && right_rises))
                continue;
            if (std::min(std::abs(ts[i]), std::abs(ts[i + 1])) >= options.grid_floor)
                continue;
            const auto [xm, tm] = br.golden(xs[i], xs[i + 1], s);
            if ((tm > 0.0) != (ts[i] > 0.0)) {
                found.push_back(br.bisect(xs[i], ts[i], xm, options.rel_tol));
                found.push_back(br.bisect(xm, tm, xs[i + 1], options.rel_tol));
            } else if (std::abs(tm) < options.grid_floor) {
                std::ostringstream os;
                os.precision(17);
                os << "possible missed root near lambda = " << -xm << " (|t| = " << std::abs(tm) << ")";
                rs.warnings.push_back(os.str());
            }
        }
        oct_lo = oct_hi;
    }

    std::sort(found.begin(), found.end());
    for (const auto& [x0, x1] : found) {
        rs.roots.push_back(-0.5 * (x0 + x1));
        rs.brackets.emplace_back(-x1, -x0);
        rs.tol = std::max(rs.tol, x1 - x0);
    }
    return rs;
}

std::vector<EigenLabel> enumerate_eigenvalues(const RootSet& roots, int level, double lo, double hi,
                                              Boundary boundary)
{
    if (level < 0)
        throw DomainError("enumerate_eigenvalues needs level >= 0");
    if (!(lo < hi) || hi > 0.0)
        throw DomainError("enumerate_eigenvalues needs a window lo < hi <= 0");
    const double gamma = roots.params.gamma;
    const double needed = std::pow(gamma, level) * lo;
    if (roots.window_lo > needed || roots.window_hi < -gamma)
        throw PreconditionError("root set window does not cover [gamma^level * lo, -gamma]");

    std::vector<EigenLabel> out;
    for (std::size_t k = 0; k < roots.roots.size(); ++k) {
        const double lk = roots.roots[k];
        if (lk < needed)
            break;
        double v = lk * std::pow(gamma, -level);
        for (int p = -level; v >= lo; ++p, v *= gamma)
            if (v < hi)
                out.push_back({static_cast<int>(k) + 1, p, v});
    }
    // The zero mode is the top of the spectrum, so a window ending at 0 keeps it.
    if (boundary == Boundary::Neumann && hi == 0.0)
        out.push_back({0, 0, 0.0});
    std::sort(out.begin(), out.end(), [](const EigenLabel& a, const EigenLabel& b) { return a.value < b.value; });
    return out;
}

IdsOracle::IdsOracle(const ModelParams& params, const BlowupPrefix& prefix, int resolution, MassScheme scheme)
    : level_(static_cast<int>(prefix.size())),
      neumann_(discretize(params, prefix, level_ + resolution, scheme), Boundary::Neumann),
      dirichlet_(discretize(params, prefix, level_ + resolution, scheme), Boundary::Dirichlet)
{
    if (resolution < 0)
        throw DomainError("IdsOracle needs resolution >= 0");
}

std::size_t IdsOracle::neumann_below(double x) const
{
    return x >= 0.0 ? size() - 1 : eigen_count(neumann_, x);
}

std::size_t IdsOracle::dirichlet_below(double x) const
{
    return x >= 0.0 ? size() : eigen_count(dirichlet_, x);
}

IdsEstimate IdsOracle::window(double lo, double hi) const
{
    if (!(lo < hi) || hi > 0.0)
        throw DomainError("IDS window must satisfy lo < hi <= 0");
    IdsEstimate e;
    e.level = level_;
    e.lo = lo;
    e.hi = hi;
    e.count_neumann = neumann_below(hi) - neumann_below(lo);
    e.count_dirichlet = dirichlet_below(hi) - dirichlet_below(lo);
    const double scale = std::ldexp(1.0, -level_);
    e.normalized_neumann = scale * static_cast<double>(e.count_neumann);
    e.normalized_dirichlet = scale * static_cast<double>(e.count_dirichlet);
    return e;
}

std::vector<IdsEstimate> ids(const ModelParams& params, const BlowupPrefix& prefix, int level,
                             const std::vector<double>& lambdas, int resolution)
{
    if (static_cast<std::size_t>(level) != prefix.size())
        throw LevelMismatchError("ids level must equal the blow-up prefix length");
    const IdsOracle oracle(params, prefix, resolution);
    std::vector<IdsEstimate> out;
    out.reserve(lambdas.size());
    for (double l : lambdas)
        out.push_back(oracle.window(l, 0.0));
    return out;
}

LyapunovSample lyapunov(const Propagator& prop, double lambda, const GreenConfig& config)
{
    LyapunovSample s;
    s.lambda = lambda;
    const auto p = prop.phi_fast(lambda);
    s.orbit = green(AffinePoint{p[0], p[1]}, prop.params(), config);
    s.zeta = s.orbit.green_estimate;
    return s;
}

const char* to_string(SpectralClass c)
{
    switch (c) {
    case SpectralClass::InSupport: return "InSupport";
    case SpectralClass::Gap: return "Gap";
    case SpectralClass::Undecided: return "Undecided";
    }
    return "?";
}

namespace {

Classification shadow_run(const Propagator& prop, double lambda, const ClassifyOptions& o, int max_iter)
{
    auto p = prop.phi_fast(lambda);
    auto q = lambda == 0.0 ? p : prop.phi_fast(lambda * (1.0 + o.twin_offset));
    Classification c;
    for (int n = 0; n <= max_iter; ++n) {
        const double np = std::hypot(p[0], p[1]);
        c.iterations = n;
        if (!std::isfinite(np) || np > o.green.escape_radius) {
            c.escape_step = n;
            c.verdict = SpectralClass::Gap;
            return c;
        }
        c.max_norm = std::max(c.max_norm, np);
        if (std::hypot(p[0] - q[0], p[1] - q[1]) > o.divergence_tol * (1.0 + np)) {
            c.horizon = n;
            c.verdict = SpectralClass::InSupport;
            return c;
        }
        if (n == max_iter)
            break;
        p = f_real(p, prop.params());
        q = f_real(q, prop.params());
    }
    c.verdict = c.max_norm * 10.0 >= o.green.escape_radius ? SpectralClass::Undecided : SpectralClass::InSupport;
    return c;
}

} // namespace

Classification classify(const Propagator& prop, double lambda, const ClassifyOptions& options)
{
    if (options.delta_one_special_case && lambda <= 0.0 && std::abs(prop.params().delta - 1.0) < 1e-15) {
        Classification c;
        c.verdict = SpectralClass::InSupport;
        return c;
    }
    Classification c = shadow_run(prop, lambda, options, options.green.max_iter);
    if (c.verdict == SpectralClass::Undecided) {
        c = shadow_run(prop, lambda, options, 4 * options.green.max_iter);
        c.rechecked = true;
    }
    return c;
}

std::vector<double> support_samples(const Propagator& prop, double lo, double hi, std::size_t count,
                                    int horizon, int grid, double radius, const ClassifyOptions& options)
{
    if (!(lo < hi) || grid < 2 || horizon < 0)
        throw DomainError("support_samples needs lo < hi, grid >= 2 and horizon >= 0");
    std::vector<double> out;
    for (int i = 0; i < grid && out.size() < count; ++i) {
        const double l = hi - (hi - lo) * i / (grid - 1);
        if (classify(prop, l, options).verdict != SpectralClass::InSupport)
            continue;
        const auto orbit = prop.phi_orbit(l, horizon + 1);
        const bool bounded = std::all_of(orbit.begin(), orbit.end(), [&](const std::array<double, 2>& q) {
            return std::hypot(q[0], q[1]) <= radius;
        });
        if (bounded)
            out.push_back(l);
    }
    return out;
}

} // namespace sslab
