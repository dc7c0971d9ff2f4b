#pragma once

#include <algorithm>
#include <cstddef>

#include "rprove/errors.hpp"
#include "rprove/interval.hpp"
#include "rprove/linalg.hpp"

namespace rprove {

// Box for (y, dy/dt, delta = dy/db, d delta/dt) valid for every seed b of the
// originating b-interval and every time in `t`.
struct StateEnclosure {
    Interval y;
    Interval v_y;
    Interval delta;
    Interval v_delta;
    Interval t;

    IVec<4> state() const { return {y, v_y, delta, v_delta}; }
};

// Box for (w, dw/ds) of the rescaled equation w(s) = y(s/b)/b, beta = 1/b.
struct ScaledStateEnclosure {
    Interval w;
    Interval v_w;
    Interval beta;
    Interval t;

    IVec<3> state() const { return {w, v_w, beta}; }
};

// Initial set for the integrator in mean-value form:
//   x(t) in center + param_matrix * (p - p_mid) + remainder,  p - p_mid in param_box
// The parameter coordinate is kept symbolic so the integrator can carry the
// correlation between components induced by the seed parameter.
template <std::size_t N, std::size_t P>
struct ParametricSet {
    Vec<N> center{};
    Mat<N, P> param_matrix{};
    IVec<P> param_box{};
    IVec<N> remainder{};
    double t = 0.0;

    IVec<N> bounds() const
    {
        IVec<N> r = la::add(la::to_interval(center), remainder);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < P; ++k) {
                r[i] += Interval(param_matrix[i][k]) * param_box[k];
            }
        }
        return r;
    }
};

namespace detail {

// f(y) = y^3 - y
inline Interval nonlinearity(const Interval& y) { return pow(y, 3) - y; }
// f'(y) = 3y^2 - 1
inline Interval nonlinearity_prime(const Interval& y) { return Interval(3.0) * sqr(y) - Interval(1.0); }

// f and f' are increasing for y >= 1/sqrt(3); evaluate at the endpoints there.
inline Interval f_of_seed(const Interval& b)
{
    if (b.lo() >= 0.6) {
        return hull(nonlinearity(Interval(b.lo())), nonlinearity(Interval(b.hi())));
    }
    return nonlinearity(b);
}

inline Interval fprime_of_seed(const Interval& b)
{
    if (b.lo() >= 0.0) {
        return hull(nonlinearity_prime(Interval(b.lo())), nonlinearity_prime(Interval(b.hi())));
    }
    return nonlinearity_prime(b);
}

inline void require_seed_above_sqrt2(const Interval& b)
{
    if (b.lo() < constants::sqrt2().lo()) {
        throw DomainError("seed interval must satisfy b >= sqrt(2)");
    }
}

inline const Interval& one_tenth()
{
    static const Interval v = Interval(1.0) / Interval(10.0);
    return v;
}

struct MainErrorTerms {
    double y, v_y, delta, v_delta;
};

// One-sided Picard remainders for y, y', delta, delta' at time t for the
// worst seed b_hi.
inline MainErrorTerms main_error_terms(double b_hi, double t)
{
    const Interval b(b_hi);
    const Interval tt(t);
    const Interval ffp = nonlinearity(b) * nonlinearity_prime(b);
    const Interval b4 = pow(b, 4);
    const Interval t3 = pow(tt, 3);
    const Interval t4 = pow(tt, 4);
    return {(ffp * t4 / Interval(120.0)).hi(), (ffp * t3 / Interval(30.0)).hi(),
            (b4 * t4 / Interval(8.0)).hi(), (b4 * t3 / Interval(2.0)).hi()};
}

} // namespace detail

// Lower bound (as result.lo) on the time up to which the delta bounds of the
// Picard comparison hold, for every b in the input.
inline Interval t_star(const Interval& b)
{
    detail::require_seed_above_sqrt2(b);
    const Interval s3b = constants::sqrt3() * b;
    const Interval num = Interval(6.0) * (s3b - Interval(1.0));
    const Interval den = s3b * (sqr(b) - Interval(1.0));
    const Interval branch_sqrt = sqrt(num / den);
    const Interval branch_log = constants::ln4() / s3b;
    return Interval(std::min(branch_sqrt.lo(), branch_log.lo()), std::min(branch_sqrt.hi(), branch_log.hi()));
}

// Second Picard iterate of the 4-variable integral system.
inline StateEnclosure picard_z2(const Interval& b, const Interval& t)
{
    const Interval fb = detail::f_of_seed(b);
    const Interval fpb = detail::fprime_of_seed(b);
    const Interval t2 = sqr(t);
    return {b - t2 * fb / Interval(6.0), -(t * fb) / Interval(3.0), Interval(1.0) - t2 * fpb / Interval(6.0),
            -(t * fpb) / Interval(3.0), t};
}

inline StateEnclosure initial_enclosure_main(const Interval& b, const Interval& t0)
{
    detail::require_seed_above_sqrt2(b);
    if (t0.lo() < 0.0) {
        throw DomainError("initial time must be nonnegative");
    }
    const Interval ts = t_star(b);
    if (!(t0.hi() <= ts.lo())) {
        throw TStarViolation("initial time exceeds the rigorous t* lower bound");
    }
    StateEnclosure z = picard_z2(b, t0);
    const auto e = detail::main_error_terms(b.hi(), t0.hi());
    z.y += Interval(0.0, e.y);
    z.v_y += Interval(0.0, e.v_y);
    z.delta += Interval(0.0, e.delta);
    z.v_delta += Interval(0.0, e.v_delta);
    return z;
}

inline ScaledStateEnclosure initial_enclosure_scaled(const Interval& beta, const Interval& t0)
{
    if (beta.lo() < 0.0) {
        throw BetaRangeError("beta must be nonnegative");
    }
    if (!(beta.hi() <= detail::one_tenth().lo())) {
        throw BetaRangeError("beta exceeds 1/10");
    }
    if (t0.lo() < 0.0) {
        throw DomainError("initial time must be nonnegative");
    }
    const Interval c = Interval(1.0) - sqr(beta);
    const Interval T(t0.hi());
    const Interval w = Interval(1.0) - c * sqr(t0) / Interval(6.0) + Interval(0.0, (pow(T, 4) / Interval(40.0)).hi());
    const Interval vw = -(c * t0) / Interval(3.0) + Interval(0.0, (pow(T, 3) / Interval(10.0)).hi());
    return {w, vw, beta, t0};
}

// Point start time used by the provers: the configured t0, pulled back to a
// fraction of t* for large seeds so the Picard remainders stay small.
inline double start_time_main(const Interval& b, double t0_hi, double tstar_fraction)
{
    const double ts = t_star(b).lo();
    return std::min(t0_hi, rounding::mul_down(ts, tstar_fraction));
}

// Mean-value-form initial set for the 4-variable system at point time t.
inline ParametricSet<4, 1> initial_set_main(const Interval& b, double t)
{
    detail::require_seed_above_sqrt2(b);
    if (!(t > 0.0)) {
        throw DomainError("start time must be positive");
    }
    if (!(t <= t_star(b).lo())) {
        throw TStarViolation("start time exceeds the rigorous t* lower bound");
    }
    const double bm = b.mid();
    const Interval tt(t);
    const Interval t2 = sqr(tt);
    const StateEnclosure zm = picard_z2(Interval(bm), tt);
    const IVec<4> zmv = zm.state();

    // d Z2 / db over the whole seed interval (f'' = 6b).
    const Interval fpb = detail::fprime_of_seed(b);
    const Interval fppb = Interval(6.0) * b;
    const IVec<4> dz = {Interval(1.0) - t2 * fpb / Interval(6.0), -(tt * fpb) / Interval(3.0),
                        -(t2 * fppb) / Interval(6.0), -(tt * fppb) / Interval(3.0)};

    const auto e = detail::main_error_terms(b.hi(), t);
    const std::array<double, 4> err = {e.y, e.v_y, e.delta, e.v_delta};

    ParametricSet<4, 1> s;
    s.t = t;
    s.param_box = {b - Interval(bm)};
    for (std::size_t i = 0; i < 4; ++i) {
        s.center[i] = zmv[i].mid();
        s.param_matrix[i][0] = dz[i].mid();
        s.remainder[i] = (zmv[i] - Interval(s.center[i])) + (dz[i] - Interval(s.param_matrix[i][0])) * s.param_box[0] +
                         Interval(0.0, err[i]);
    }
    return s;
}

// Mean-value-form initial set for the rescaled system, state (w, w', beta).
inline ParametricSet<3, 1> initial_set_scaled(const Interval& beta, double t)
{
    if (beta.lo() < 0.0) {
        throw BetaRangeError("beta must be nonnegative");
    }
    if (!(beta.hi() <= detail::one_tenth().lo())) {
        throw BetaRangeError("beta exceeds 1/10");
    }
    if (!(t > 0.0)) {
        throw DomainError("start time must be positive");
    }
    const double bm = beta.mid();
    const Interval tt(t);
    const Interval t2 = sqr(tt);
    const Interval cm = Interval(1.0) - sqr(Interval(bm));
    const IVec<3> zm = {Interval(1.0) - cm * t2 / Interval(6.0), -(cm * tt) / Interval(3.0), Interval(bm)};
    const IVec<3> dz = {beta * t2 / Interval(3.0), Interval(2.0) * beta * tt / Interval(3.0), Interval(1.0)};
    const std::array<double, 3> err = {(pow(tt, 4) / Interval(40.0)).hi(), (pow(tt, 3) / Interval(10.0)).hi(), 0.0};

    ParametricSet<3, 1> s;
    s.t = t;
    s.param_box = {beta - Interval(bm)};
    for (std::size_t i = 0; i < 3; ++i) {
        s.center[i] = zm[i].mid();
        s.param_matrix[i][0] = dz[i].mid();
        s.remainder[i] = (zm[i] - Interval(s.center[i])) + (dz[i] - Interval(s.param_matrix[i][0])) * s.param_box[0] +
                         Interval(0.0, err[i]);
    }
    return s;
}

} // namespace rprove
