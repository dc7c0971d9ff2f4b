#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rprove/errors.hpp"
#include "rprove/interval.hpp"
#include "rprove/linalg.hpp"

namespace rprove {

// Interval value with interval gradient w.r.t. N inputs (forward mode).
// Taylor coefficients computed over Grad<N> give the coefficients together
// with their Jacobian w.r.t. the state at the expansion point.
template <std::size_t N>
struct Grad {
    Interval v;
    std::array<Interval, N> d{};

    static Grad variable(const Interval& value, std::size_t i)
    {
        Grad g{value, {}};
        for (auto& x : g.d) {
            x = Interval(0.0);
        }
        g.d[i] = Interval(1.0);
        return g;
    }
    static Grad constant(const Interval& value)
    {
        Grad g{value, {}};
        for (auto& x : g.d) {
            x = Interval(0.0);
        }
        return g;
    }
};

template <std::size_t N>
Grad<N> operator+(const Grad<N>& a, const Grad<N>& b)
{
    Grad<N> r{a.v + b.v, {}};
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = a.d[i] + b.d[i];
    }
    return r;
}

template <std::size_t N>
Grad<N> operator-(const Grad<N>& a, const Grad<N>& b)
{
    Grad<N> r{a.v - b.v, {}};
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = a.d[i] - b.d[i];
    }
    return r;
}

template <std::size_t N>
Grad<N> operator*(const Grad<N>& a, const Grad<N>& b)
{
    Grad<N> r{a.v * b.v, {}};
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = a.v * b.d[i] + b.v * a.d[i];
    }
    return r;
}

template <std::size_t N>
Grad<N> operator*(const Interval& a, const Grad<N>& b)
{
    Grad<N> r{a * b.v, {}};
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = a * b.d[i];
    }
    return r;
}

template <std::size_t N>
Grad<N> operator/(const Grad<N>& a, const Interval& s)
{
    Grad<N> r{a.v / s, {}};
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = a.d[i] / s;
    }
    return r;
}

template <std::size_t N>
Grad<N>& operator+=(Grad<N>& a, const Grad<N>& b)
{
    return a = a + b;
}

template <std::size_t N>
Grad<N> sqr(const Grad<N>& a)
{
    Grad<N> r{sqr(a.v), {}};
    const Interval two_v = Interval(2.0) * a.v;
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = two_v * a.d[i];
    }
    return r;
}

template <std::size_t N>
Grad<N> cube(const Grad<N>& a)
{
    Grad<N> r{pow(a.v, 3), {}};
    const Interval three_v2 = Interval(3.0) * sqr(a.v);
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = three_v2 * a.d[i];
    }
    return r;
}

inline Interval cube(const Interval& a) { return pow(a, 3); }

inline Interval zero_like(const Interval&) { return Interval(0.0); }
template <std::size_t N>
Grad<N> zero_like(const Grad<N>&)
{
    return Grad<N>::constant(Interval(0.0));
}

namespace taylor_detail {

// Cauchy product coefficient k of two series.
template <class A, class B>
auto cauchy(const std::vector<A>& a, const std::vector<B>& b, std::size_t k)
{
    auto acc = a[0] * b[k];
    for (std::size_t i = 1; i <= k; ++i) {
        acc += a[i] * b[k - i];
    }
    return acc;
}

// Coefficient k of a^2 using the symmetric form.
template <class S>
S square_coeff(const std::vector<S>& a, std::size_t k)
{
    if (k == 0) {
        return sqr(a[0]);
    }
    S acc = a[0] * a[k];
    for (std::size_t i = 1; 2 * i < k; ++i) {
        acc += a[i] * a[k - i];
    }
    acc = Interval(2.0) * acc;
    if (k % 2 == 0) {
        acc += sqr(a[k / 2]);
    }
    return acc;
}

// Coefficients of 1/tau expanded at tau = t: (-1)^j / t^(j+1).
inline std::vector<Interval> inverse_time_series(const Interval& t, std::size_t order)
{
    if (!(t.lo() > 0.0)) {
        throw SingularTime();
    }
    std::vector<Interval> u(order + 1);
    const Interval u0 = Interval(1.0) / t;
    for (std::size_t j = 0; j <= order; ++j) {
        const Interval p = pow(u0, static_cast<int>(j + 1));
        u[j] = (j % 2 == 0) ? p : -p;
    }
    return u;
}

} // namespace taylor_detail

// y'' + (2/t) y' + y^3 - y = 0 together with its variational equation
// delta'' + (2/t) delta' + (3y^2 - 1) delta = 0, as a first-order system in
// (y, v_y, delta, v_delta).
struct MainSystem {
    static constexpr std::size_t N = 4;
    static constexpr std::array<const char*, 4> names = {"y", "vy", "delta", "vdelta"};

    template <class S>
    static std::vector<std::array<S, N>> series(const std::array<S, N>& x0, const Interval& t, std::size_t order)
    {
        using taylor_detail::cauchy;
        using taylor_detail::square_coeff;
        const auto u = taylor_detail::inverse_time_series(t, order);
        std::vector<S> y(order + 1), v(order + 1), d(order + 1), vd(order + 1);
        std::vector<S> y2(order), y3(order);
        y[0] = x0[0];
        v[0] = x0[1];
        d[0] = x0[2];
        vd[0] = x0[3];
        for (std::size_t k = 0; k < order; ++k) {
            y2[k] = square_coeff(y, k);
            y3[k] = k == 0 ? cube(y[0]) : cauchy(y2, y, k);
            const S uv = cauchy(u, v, k);
            const S uvd = cauchy(u, vd, k);
            const S y2d = cauchy(y2, d, k);
            const Interval kp1(static_cast<double>(k + 1));
            y[k + 1] = v[k] / kp1;
            v[k + 1] = (y[k] - Interval(2.0) * uv - y3[k]) / kp1;
            d[k + 1] = vd[k] / kp1;
            vd[k + 1] = (d[k] - Interval(2.0) * uvd - Interval(3.0) * y2d) / kp1;
        }
        std::vector<std::array<S, N>> out(order + 1);
        for (std::size_t k = 0; k <= order; ++k) {
            out[k] = {y[k], v[k], d[k], vd[k]};
        }
        return out;
    }

    static IVec<N> field(const IVec<N>& x, const Interval& t)
    {
        if (!(t.lo() > 0.0)) {
            throw SingularTime();
        }
        const Interval two_over_t = Interval(2.0) / t;
        const Interval& y = x[0];
        const Interval fy_a = pow(y, 3) - y;
        const Interval fy_b = y * (sqr(y) - Interval(1.0));
        const Interval fy = intersect(fy_a, fy_b).value_or(fy_a);
        const Interval fpy = Interval(3.0) * sqr(y) - Interval(1.0);
        return {x[1], -(two_over_t * x[1]) - fy, x[3], -(two_over_t * x[3]) - fpy * x[2]};
    }
};

// w'' + (2/s) w' + w^3 - beta^2 w = 0 with beta carried as a constant state
// component, state (w, v_w, beta).
struct ScaledSystem {
    static constexpr std::size_t N = 3;
    static constexpr std::array<const char*, 3> names = {"w", "vw", "beta"};

    template <class S>
    static std::vector<std::array<S, N>> series(const std::array<S, N>& x0, const Interval& t, std::size_t order)
    {
        using taylor_detail::cauchy;
        using taylor_detail::square_coeff;
        const auto u = taylor_detail::inverse_time_series(t, order);
        std::vector<S> w(order + 1), v(order + 1), w2(order), w3(order);
        w[0] = x0[0];
        v[0] = x0[1];
        const S beta2 = sqr(x0[2]);
        for (std::size_t k = 0; k < order; ++k) {
            w2[k] = square_coeff(w, k);
            w3[k] = k == 0 ? cube(w[0]) : cauchy(w2, w, k);
            const S uv = cauchy(u, v, k);
            const Interval kp1(static_cast<double>(k + 1));
            w[k + 1] = v[k] / kp1;
            v[k + 1] = (beta2 * w[k] - Interval(2.0) * uv - w3[k]) / kp1;
        }
        std::vector<std::array<S, N>> out(order + 1);
        const S zero = zero_like(x0[2]);
        for (std::size_t k = 0; k <= order; ++k) {
            out[k] = {w[k], v[k], k == 0 ? x0[2] : zero};
        }
        return out;
    }

    static IVec<N> field(const IVec<N>& x, const Interval& t)
    {
        if (!(t.lo() > 0.0)) {
            throw SingularTime();
        }
        const Interval two_over_t = Interval(2.0) / t;
        const Interval& w = x[0];
        const Interval b2 = sqr(x[2]);
        const Interval fa = pow(w, 3) - b2 * w;
        const Interval fb = w * (sqr(w) - b2);
        const Interval fw = intersect(fa, fb).value_or(fa);
        return {x[1], -(two_over_t * x[1]) - fw, Interval(0.0)};
    }
};

enum class SystemKind { main, scaled };

// Taylor coefficients (index j = 0..order) of the solution through `state`
// at time t.
template <class System>
std::vector<IVec<System::N>> taylor_coeffs(const IVec<System::N>& state, const Interval& t, std::size_t order)
{
    if (order < 2) {
        throw DomainError("Taylor order must be at least 2");
    }
    return System::template series<Interval>(state, t, order);
}

} // namespace rprove
