#pragma once

// Non-rigorous extended-precision reference solutions used by the tests.
// Written independently of the library: power series at t = 0 and a
// long-double Taylor method for t > 0.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Real = long double;
using State4 = std::array<Real, 4>; // y, y', delta, delta'
using State2 = std::array<Real, 2>; // w, w'

namespace detail {

inline Real cauchy(const std::vector<Real>& a, const std::vector<Real>& b, std::size_t k)
{
    Real s = 0;
    for (std::size_t i = 0; i <= k; ++i) {
        s += a[i] * b[k - i];
    }
    return s;
}

// Value and derivative of sum c_j t^j.
inline std::array<Real, 2> eval(const std::vector<Real>& c, Real t)
{
    Real v = 0;
    Real d = 0;
    for (std::size_t j = c.size(); j-- > 0;) {
        v = v * t + c[j];
        if (j > 0) {
            d = d * t + static_cast<Real>(j) * c[j];
        }
    }
    return {v, d};
}

} // namespace detail

// Solution of y'' + (2/t) y' = g(y) with y(0) = b, y'(0) = 0, through the
// series recurrence c_{j+2} (j+2)(j+3) = -[y^3 - y]_j, and the same for delta.
inline State4 main_at(Real b, Real t, std::size_t terms = 120)
{
    std::vector<Real> y(terms + 2, 0), d(terms + 2, 0), y2(terms + 2, 0), y3(terms + 2, 0), y2d(terms + 2, 0);
    y[0] = b;
    d[0] = 1;
    for (std::size_t j = 0; j + 2 < terms; ++j) {
        y2[j] = detail::cauchy(y, y, j);
        y3[j] = detail::cauchy(y2, y, j);
        y2d[j] = detail::cauchy(y2, d, j);
        const Real den = static_cast<Real>((j + 2) * (j + 3));
        y[j + 2] = -(y3[j] - y[j]) / den;
        d[j + 2] = -(3 * y2d[j] - d[j]) / den;
    }
    y.resize(terms);
    d.resize(terms);
    const auto ye = detail::eval(y, t);
    const auto de = detail::eval(d, t);
    return {ye[0], ye[1], de[0], de[1]};
}

inline State2 scaled_at(Real beta, Real s, std::size_t terms = 120)
{
    std::vector<Real> w(terms + 2, 0), w2(terms + 2, 0), w3(terms + 2, 0);
    w[0] = 1;
    const Real b2 = beta * beta;
    for (std::size_t j = 0; j + 2 < terms; ++j) {
        w2[j] = detail::cauchy(w, w, j);
        w3[j] = detail::cauchy(w2, w, j);
        w[j + 2] = -(w3[j] - b2 * w[j]) / static_cast<Real>((j + 2) * (j + 3));
    }
    w.resize(terms);
    const auto e = detail::eval(w, s);
    return {e[0], e[1]};
}

// One Taylor step of order p for the 4-variable system at regular time t.
inline State4 main_taylor_step(const State4& x, Real t, Real h, std::size_t p = 32)
{
    std::vector<Real> y(p + 1), v(p + 1), d(p + 1), vd(p + 1), u(p + 1), y2(p + 1);
    y[0] = x[0];
    v[0] = x[1];
    d[0] = x[2];
    vd[0] = x[3];
    Real inv = 1 / t;
    for (std::size_t j = 0; j <= p; ++j) {
        u[j] = (j % 2 == 0 ? 1 : -1) * std::pow(inv, static_cast<Real>(j + 1));
    }
    for (std::size_t k = 0; k < p; ++k) {
        y2[k] = detail::cauchy(y, y, k);
        const Real y3 = detail::cauchy(y2, y, k);
        const Real kp1 = static_cast<Real>(k + 1);
        y[k + 1] = v[k] / kp1;
        v[k + 1] = (y[k] - 2 * detail::cauchy(u, v, k) - y3) / kp1;
        d[k + 1] = vd[k] / kp1;
        vd[k + 1] = (d[k] - 2 * detail::cauchy(u, vd, k) - 3 * detail::cauchy(y2, d, k)) / kp1;
    }
    State4 out{};
    const std::array<const std::vector<Real>*, 4> c = {&y, &v, &d, &vd};
    for (std::size_t i = 0; i < 4; ++i) {
        Real s = 0;
        for (std::size_t j = p + 1; j-- > 0;) {
            s = s * h + (*c[i])[j];
        }
        out[i] = s;
    }
    return out;
}

inline State2 scaled_taylor_step(const State2& x, Real beta, Real t, Real h, std::size_t p = 32)
{
    std::vector<Real> w(p + 1), v(p + 1), u(p + 1), w2(p + 1);
    w[0] = x[0];
    v[0] = x[1];
    for (std::size_t j = 0; j <= p; ++j) {
        u[j] = (j % 2 == 0 ? 1 : -1) * std::pow(1 / t, static_cast<Real>(j + 1));
    }
    const Real b2 = beta * beta;
    for (std::size_t k = 0; k < p; ++k) {
        w2[k] = detail::cauchy(w, w, k);
        const Real w3 = detail::cauchy(w2, w, k);
        const Real kp1 = static_cast<Real>(k + 1);
        w[k + 1] = v[k] / kp1;
        v[k + 1] = (b2 * w[k] - 2 * detail::cauchy(u, v, k) - w3) / kp1;
    }
    State2 out{};
    Real sw = 0;
    Real sv = 0;
    for (std::size_t j = p + 1; j-- > 0;) {
        sw = sw * h + w[j];
        sv = sv * h + v[j];
    }
    out[0] = sw;
    out[1] = sv;
    return out;
}

// Step size keeping the Taylor steps well inside the convergence radius:
// limited by the distance to t = 0 and by the local time scale.
inline Real safe_step(Real t, Real scale)
{
    return std::min(t / 4, static_cast<Real>(0.25) / scale);
}

// Reference trajectory of the 4-variable system evaluated at increasing
// times (all > 0).
inline std::vector<State4> main_trajectory(Real b, const std::vector<Real>& times)
{
    std::vector<State4> out;
    Real t = std::min(static_cast<Real>(0.05) / b, times.empty() ? 1 : times.front());
    State4 x = main_at(b, t);
    for (Real target : times) {
        while (t < target) {
            const Real scale = 1 + std::fabs(x[0]) + std::sqrt(std::fabs(x[1]));
            const Real h = std::min(safe_step(t, scale), target - t);
            x = main_taylor_step(x, t, h);
            t += h;
        }
        out.push_back(x);
    }
    return out;
}

inline std::vector<State2> scaled_trajectory(Real beta, const std::vector<Real>& times)
{
    std::vector<State2> out;
    Real t = std::min(static_cast<Real>(0.05), times.empty() ? 1 : times.front());
    State2 x = scaled_at(beta, t);
    for (Real target : times) {
        while (t < target) {
            const Real scale = 1 + std::fabs(x[0]) + std::sqrt(std::fabs(x[1]));
            const Real h = std::min(safe_step(t, scale), target - t);
            x = scaled_taylor_step(x, beta, t, h);
            t += h;
        }
        out.push_back(x);
    }
    return out;
}

inline Real energy(Real y, Real v) { return v * v / 2 + y * y * y * y / 4 - y * y / 2; }

// Zero crossings of y on a fine grid up to T (stops once trapped).
inline int crossings(Real b, Real T, Real dt = 0.002L, bool* trapped = nullptr)
{
    std::vector<Real> times;
    for (Real t = dt; t <= T; t += dt) {
        times.push_back(t);
    }
    Real t = std::min(static_cast<Real>(0.05) / b, dt / 2);
    State4 x = main_at(b, t);
    int sign = 1;
    int count = 0;
    if (trapped != nullptr) {
        *trapped = false;
    }
    for (Real target : times) {
        while (t < target) {
            const Real scale = 1 + std::fabs(x[0]) + std::sqrt(std::fabs(x[1]));
            const Real h = std::min(safe_step(t, scale), target - t);
            x = main_taylor_step(x, t, h);
            t += h;
        }
        const int s = x[0] > 0 ? 1 : (x[0] < 0 ? -1 : 0);
        if (s != 0 && s != sign) {
            ++count;
            sign = s;
        }
        if (energy(x[0], x[1]) < -0.01L) {
            if (trapped != nullptr) {
                *trapped = true;
            }
            break;
        }
    }
    return count;
}

} // namespace oracle
