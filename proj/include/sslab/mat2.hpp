#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace sslab {

using cplx = std::complex<double>;

/// Row-major 2x2 matrix over double or complex<double>.
template <class T>
struct Mat2 {
    std::array<T, 4> m{T(1), T(0), T(0), T(1)};

    constexpr T& operator()(int i, int j) { return m[2 * i + j]; }
    constexpr const T& operator()(int i, int j) const { return m[2 * i + j]; }

    static constexpr Mat2 identity() { return Mat2{}; }
    static constexpr Mat2 from(T a, T b, T c, T d) { return Mat2{{a, b, c, d}}; }
    static constexpr Mat2 diag(T a, T d) { return Mat2{{a, T(0), T(0), d}}; }

    constexpr T det() const { return m[0] * m[3] - m[1] * m[2]; }
    constexpr T trace() const { return m[0] + m[3]; }
    constexpr Mat2 transpose() const { return from(m[0], m[2], m[1], m[3]); }

    /// Sum of squared moduli, i.e. Tr(M* M).
    double frobenius2() const
    {
        double s = 0.0;
        for (const auto& v : m)
            s += std::norm(v);
        return s;
    }

    friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y)
    {
        return from(x.m[0] * y.m[0] + x.m[1] * y.m[2], x.m[0] * y.m[1] + x.m[1] * y.m[3],
                    x.m[2] * y.m[0] + x.m[3] * y.m[2], x.m[2] * y.m[1] + x.m[3] * y.m[3]);
    }
    friend constexpr Mat2 operator*(T s, const Mat2& x)
    {
        return from(s * x.m[0], s * x.m[1], s * x.m[2], s * x.m[3]);
    }
    friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y)
    {
        return from(x.m[0] + y.m[0], x.m[1] + y.m[1], x.m[2] + y.m[2], x.m[3] + y.m[3]);
    }
    friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y)
    {
        return from(x.m[0] - y.m[0], x.m[1] - y.m[1], x.m[2] - y.m[2], x.m[3] - y.m[3]);
    }
    constexpr std::array<T, 2> apply(const std::array<T, 2>& v) const
    {
        return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    }
};

/// Largest entrywise modulus of x - y.
template <class T>
double max_abs_diff(const Mat2<T>& x, const Mat2<T>& y)
{
    double e = 0.0;
    for (int k = 0; k < 4; ++k)
        e = std::max(e, std::abs(x.m[k] - y.m[k]));
    return e;
}

template <class T>
double max_abs(const Mat2<T>& x)
{
    double e = 0.0;
    for (const auto& v : x.m)
        e = std::max(e, std::abs(v));
    return e;
}

/// Eigenvalues (ascending) of a real symmetric 2x2 matrix.
inline std::array<double, 2> sym_eigenvalues(const Mat2<double>& s)
{
    const double mean = 0.5 * (s(0, 0) + s(1, 1));
    const double half = 0.5 * (s(0, 0) - s(1, 1));
    const double rad = std::hypot(half, s(0, 1));
    return {mean - rad, mean + rad};
}

} // namespace sslab
