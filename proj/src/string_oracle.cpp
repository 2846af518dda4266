#include "sslab/string_oracle.hpp"

#include "sslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sslab {

const char* to_string(MassScheme s)
{
    switch (s) {
    case MassScheme::Midpoint: return "midpoint";
    case MassScheme::LeftEndpoint: return "left";
    case MassScheme::Barycenter: return "barycenter";
    }
    return "?";
}

const char* to_string(Boundary b) { return b == Boundary::Neumann ? "neumann" : "dirichlet"; }

double DiscreteString::total_mass() const
{
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

DiscreteString discretize(const ModelParams& params, const BlowupPrefix& prefix, int level,
                          MassScheme scheme)
{
    if (level < 0)
        throw DomainError("discretize needs level >= 0");
    if (level > 26)
        throw DomainError("discretize level too large");
    const CellAddress whole{prefix.size(), {}};
    const Interval dom = cell_interval(params, prefix, whole);

    // Cells are refined in place: [l, r] with mass m splits at l + alpha (r - l)
    // into masses w1 m and w2 m. Left endpoints and masses suffice.
    const std::size_t n_cells = std::size_t{1} << level;
    std::vector<double> lefts{dom.left}, widths{dom.width()}, masses{cell_mass(params, prefix, whole)};
    lefts.reserve(n_cells);
    for (int k = 0; k < level; ++k) {
        std::vector<double> nl, nw, nm;
        nl.reserve(2 * lefts.size());
        nw.reserve(2 * lefts.size());
        nm.reserve(2 * lefts.size());
        for (std::size_t i = 0; i < lefts.size(); ++i) {
            const double h1 = params.alpha * widths[i];
            nl.push_back(lefts[i]);
            nw.push_back(h1);
            nm.push_back(params.w1 * masses[i]);
            nl.push_back(lefts[i] + h1);
            nw.push_back(widths[i] - h1);
            nm.push_back(params.w2 * masses[i]);
        }
        lefts.swap(nl);
        widths.swap(nw);
        masses.swap(nm);
    }

    DiscreteString s;
    s.left = dom.left;
    s.right = dom.right;
    s.level = level;
    s.blowup_length = prefix.size();
    s.masses = std::move(masses);
    s.positions.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        switch (scheme) {
        case MassScheme::Midpoint: s.positions[i] = lefts[i] + 0.5 * widths[i]; break;
        case MassScheme::LeftEndpoint: s.positions[i] = lefts[i]; break;
        case MassScheme::Barycenter: s.positions[i] = lefts[i] + params.M * widths[i]; break;
        }
    }
    return s;
}

namespace {

template <class T>
Mat2<T> propagate_impl(const DiscreteString& string, T lambda, double s, double t)
{
    if (!(s < t))
        throw DomainError("propagate needs s < t");
    // Row vector bookkeeping: state (f, f') advances as v <- G v, so the product accumulates as G * M.
    T f0(1.0), g0(0.0), f1(0.0), g1(1.0); // columns: image of (1,0) and (0,1)
    double x = s;
    const auto& pos = string.positions;
    auto it = std::upper_bound(pos.begin(), pos.end(), s);
    for (; it != pos.end() && *it <= t; ++it) {
        const double ell = *it - x;
        f0 += ell * g0;
        f1 += ell * g1;
        const T kick = lambda * string.masses[static_cast<std::size_t>(it - pos.begin())];
        g0 += kick * f0;
        g1 += kick * f1;
        x = *it;
    }
    const double ell = t - x;
    f0 += ell * g0;
    f1 += ell * g1;
    return Mat2<T>::from(f0, f1, g0, g1);
}

} // namespace

Mat2<double> propagate(const DiscreteString& string, double lambda, double s, double t)
{
    return propagate_impl(string, lambda, s, t);
}

Mat2<cplx> propagate(const DiscreteString& string, cplx lambda, double s, double t)
{
    return propagate_impl(string, lambda, s, t);
}

Mat2<double> propagate(const DiscreteString& string, double lambda)
{
    return propagate_impl(string, lambda, string.left, string.right);
}

Mat2<cplx> propagate(const DiscreteString& string, cplx lambda)
{
    return propagate_impl(string, lambda, string.left, string.right);
}

TridiagonalOperator::TridiagonalOperator(const DiscreteString& string, Boundary boundary)
    : masses_(string.masses), boundary_(boundary)
{
    const std::size_t n = string.size();
    if (n == 0)
        throw DomainError("operator needs at least one mass");
    const auto& x = string.positions;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(masses_[i] > 0.0))
            throw DomainError("masses must be positive");
        if (!(x[i] > string.left && x[i] < string.right) && boundary == Boundary::Dirichlet)
            throw DomainError("Dirichlet operator needs masses strictly inside the domain");
        if (i + 1 < n && !(x[i + 1] > x[i]))
            throw DomainError("positions must be strictly increasing");
    }
    diag_.assign(n, 0.0);
    off_.assign(n - 1, 0.0);
    sub_unsym_.assign(n, 0.0);
    sup_unsym_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double k = 1.0 / (x[i + 1] - x[i]);
        diag_[i] -= k / masses_[i];
        diag_[i + 1] -= k / masses_[i + 1];
        sup_unsym_[i] = k / masses_[i];
        sub_unsym_[i + 1] = k / masses_[i + 1];
        off_[i] = k / std::sqrt(masses_[i] * masses_[i + 1]);
    }
    if (boundary == Boundary::Dirichlet) {
        diag_.front() -= 1.0 / ((x.front() - string.left) * masses_.front());
        diag_.back() -= 1.0 / ((string.right - x.back()) * masses_.back());
    }
}

std::vector<double> TridiagonalOperator::apply(const std::vector<double>& f) const
{
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag_[i] * f[i];
        if (i > 0)
            v += sub_unsym_[i] * f[i - 1];
        if (i + 1 < n)
            v += sup_unsym_[i] * f[i + 1];
        out[i] = v;
    }
    return out;
}

std::pair<double, double> TridiagonalOperator::gershgorin() const
{
    double lo = 0.0, hi = -std::numeric_limits<double>::infinity();
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0)
            r += std::abs(off_[i - 1]);
        if (i + 1 < n)
            r += std::abs(off_[i]);
        lo = std::min(lo, diag_[i] - r);
        hi = std::max(hi, diag_[i] + r);
    }
    return {lo, hi};
}

double TridiagonalOperator::norm_inf() const
{
    const auto [lo, hi] = gershgorin();
    return std::max(std::abs(lo), std::abs(hi));
}

TridiagonalOperator build_operator(const DiscreteString& string, Boundary boundary)
{
    return TridiagonalOperator(string, boundary);
}

EigenCount eigen_count_detail(const TridiagonalOperator& op, double lambda)
{
    const auto& d = op.diagonal();
    const auto& e = op.off_diagonal();
    const std::size_t n = d.size();
    EigenCount out;
    double x = lambda;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::size_t neg = 0;
        bool singular = false;
        double piv = d[0] - x;
        for (std::size_t i = 0;; ++i) {
            if (std::abs(piv) < 1e-300) {
                singular = true;
                break;
            }
            if (piv < 0.0)
                ++neg;
            if (i + 1 == n)
                break;
            piv = (d[i + 1] - x) - e[i] * (e[i] / piv);
        }
        if (!singular) {
            out.count = neg;
            out.lambda_used = x;
            return out;
        }
        x += 1e-9 * (1.0 + std::abs(x));
        ++out.jitters;
    }
    throw ConvergenceError("eigen_count: singular pivots persisted after jitter");
}

std::size_t eigen_count(const TridiagonalOperator& op, double lambda)
{
    return eigen_count_detail(op, lambda).count;
}

bool EigenSolveResult::all_converged() const
{
    return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

double mass_inner(const std::vector<double>& masses, const std::vector<double>& f,
                  const std::vector<double>& g)
{
    double s = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i)
        s += masses[i] * f[i] * g[i];
    return s;
}

namespace {

// Solves (T - mu) x = rhs for symmetric tridiagonal T by Gaussian elimination
// with partial pivoting (the LAPACK gttrf/gttrs scheme).
class ShiftedSolver {
public:
    ShiftedSolver(const std::vector<double>& d, const std::vector<double>& e, double mu, double floor)
        : n_(d.size()), dl_(e), dd_(d), du_(e), du2_(n_, 0.0), swap_(n_, false)
    {
        for (auto& v : dd_)
            v -= mu;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(dd_[i]) >= std::abs(dl_[i])) {
                if (dd_[i] == 0.0)
                    dd_[i] = floor;
                const double l = dl_[i] / dd_[i];
                dl_[i] = l;
                dd_[i + 1] -= l * du_[i];
            } else {
                const double l = dd_[i] / dl_[i];
                dd_[i] = dl_[i];
                dl_[i] = l;
                const double t = du_[i];
                du_[i] = dd_[i + 1];
                dd_[i + 1] = t - l * dd_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -l * du_[i + 1];
                }
                swap_[i] = true;
            }
        }
        for (auto& v : dd_)
            if (std::abs(v) < floor)
                v = v < 0 ? -floor : floor;
    }

    void solve(std::vector<double>& b) const
    {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (swap_[i]) {
                const double t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - dl_[i] * b[i];
            } else {
                b[i + 1] -= dl_[i] * b[i];
            }
        }
        for (std::size_t k = n_; k-- > 0;) {
            double v = b[k];
            if (k + 1 < n_)
                v -= du_[k] * b[k + 1];
            if (k + 2 < n_)
                v -= du2_[k] * b[k + 2];
            b[k] = v / dd_[k];
        }
    }

private:
    std::size_t n_;
    std::vector<double> dl_, dd_, du_, du2_;
    std::vector<bool> swap_;
};

double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

EigenSolveResult eigen_solve(const TridiagonalOperator& op, double lo, double hi,
                             const EigenSolveOptions& options)
{
    if (!(lo < hi))
        throw DomainError("eigen_solve needs lo < hi");
    EigenSolveResult out;
    const std::size_t c_lo = eigen_count(op, lo);
    const std::size_t c_hi = eigen_count(op, hi);
    if (c_hi <= c_lo)
        return out;

    // j-th eigenvalue (0-based, ascending) by bisection inside [lo, hi).
    out.values.reserve(c_hi - c_lo);
    double left = lo;
    for (std::size_t j = c_lo; j < c_hi; ++j) {
        double a = left, b = hi;
        while (b - a > options.tol) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b)
                break;
            if (eigen_count(op, m) > j)
                b = m;
            else
                a = m;
        }
        const double v = 0.5 * (a + b);
        out.values.push_back(v);
        left = a;
    }
    if (!options.vectors)
        return out;

    const auto& d = op.diagonal();
    const auto& e = op.off_diagonal();
    const auto& w = op.masses();
    const std::size_t n = d.size();
    const double snorm = op.norm_inf();
    const double cluster = 1e-3 * snorm;
    const double floor = std::numeric_limits<double>::epsilon() * snorm;

    std::vector<std::vector<double>> sym; // Euclidean-orthonormal eigenvectors of S
    sym.reserve(out.values.size());
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
        const double mu = out.values[idx];
        // Seed per eigenvalue index so the result does not depend on evaluation order.
        std::mt19937_64 rng(options.seed + (c_lo + idx) * 0x9E3779B97F4A7C15ULL);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<double> x(n);
        for (auto& v : x)
            v = uni(rng);
        double nx = norm2(x);
        for (auto& v : x)
            v /= nx;

        std::size_t first_in_cluster = idx;
        while (first_in_cluster > 0 && mu - out.values[first_in_cluster - 1] <= cluster)
            --first_in_cluster;

        const ShiftedSolver solver(d, e, mu, floor);
        bool ok = false;
        double res = 0.0;
        for (int it = 0; it < options.max_iter; ++it) {
            solver.solve(x);
            for (std::size_t k = first_in_cluster; k < idx; ++k) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    dot += sym[k][i] * x[i];
                for (std::size_t i = 0; i < n; ++i)
                    x[i] -= dot * sym[k][i];
            }
            nx = norm2(x);
            if (!(nx > 0.0) || !std::isfinite(nx))
                break;
            for (auto& v : x)
                v /= nx;
            // Relative residual ||S x - mu x|| / ||S||.
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double v = (d[i] - mu) * x[i];
                if (i > 0)
                    v += e[i - 1] * x[i - 1];
                if (i + 1 < n)
                    v += e[i] * x[i + 1];
                r2 += v * v;
            }
            res = std::sqrt(r2) / snorm;
            if (res <= options.residual_tol) {
                ok = true;
                // One more step settles the direction inside clusters.
                if (it > 0)
                    break;
            }
        }
        sym.push_back(x);
        out.converged.push_back(ok);
        out.residuals.push_back(res);
    }
    out.vectors.reserve(sym.size());
    for (auto& x : sym) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] /= std::sqrt(w[i]);
        out.vectors.push_back(std::move(x));
    }
    return out;
}

} // namespace sslab
