#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "rprove/desingularize.hpp"
#include "rprove/interval.hpp"
#include "rprove/linalg.hpp"
#include "rprove/taylor.hpp"

namespace rprove {

enum class WrappingMode { qr, parallelepiped };

struct IntegratorOptions {
    std::size_t order = 15;
    // Per-step bound on the Taylor remainder, scaled by max(1, |x_i|).
    double tolerance = 1e-12;
    double h_min = 1e-6;
    double h_max = 1.0;
    double backoff = 0.7;
    // Accepted remainder may exceed the target tolerance by this factor.
    double remainder_slack = 1e3;
    std::size_t max_steps = 200000;
    WrappingMode wrapping = WrappingMode::qr;
};

// Set {center + param_matrix * p + transform * r : p in param_box, r in box}
// at time t. `bounds` is a box known to contain the set.
template <std::size_t N, std::size_t P>
struct EnclosureRepresentation {
    Vec<N> center{};
    Mat<N, P> param_matrix{};
    IVec<P> param_box{};
    Mat<N, N> transform{};
    IVec<N> box{};
    IVec<N> bounds{};
    double t = 0.0;

    static EnclosureRepresentation from(const ParametricSet<N, P>& s)
    {
        EnclosureRepresentation e;
        e.center = s.center;
        e.param_matrix = s.param_matrix;
        e.param_box = s.param_box;
        e.transform = la::identity<N>();
        e.box = s.remainder;
        e.bounds = s.bounds();
        e.t = s.t;
        return e;
    }

    // Offset from the center as (parameter part, transformed part).
    IVec<N> offset_bounds() const
    {
        IVec<N> r = la::mul(transform, box);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < P; ++k) {
                r[i] += Interval(param_matrix[i][k]) * param_box[k];
            }
        }
        return r;
    }
};

template <std::size_t N>
struct TaylorStep {
    std::size_t order = 0;
    std::vector<IVec<N>> coeffs; // at the step start, expanded at the center
    IVec<N> apriori{};           // valid on [t_begin, t_end]
    IVec<N> remainder{};
    Interval h;
    double t_begin = 0.0;
    double t_end = 0.0;
};

template <std::size_t N>
struct StepRecord {
    double t_begin = 0.0;
    double t_end = 0.0;
    IVec<N> apriori{};
    IVec<N> end{};
};

enum class StopReason { reached_time, predicate, step_failure, width_exceeded, max_steps };

inline const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::reached_time:
        return "reached_time";
    case StopReason::predicate:
        return "predicate";
    case StopReason::step_failure:
        return "step_failure";
    case StopReason::width_exceeded:
        return "width_exceeded";
    case StopReason::max_steps:
        return "max_steps";
    }
    return "unknown";
}

template <std::size_t N, std::size_t P>
struct Trajectory {
    std::vector<StepRecord<N>> steps; // steps[0] is the seed (t_begin == t_end)
    EnclosureRepresentation<N, P> last;
    StopReason reason = StopReason::reached_time;

    double end_time() const { return steps.back().t_end; }
};

template <std::size_t N, std::size_t P>
struct StopCondition {
    double t_end = std::numeric_limits<double>::infinity();
    // Evaluated after every accepted step; returning true stops integration.
    std::function<bool(const Trajectory<N, P>&, const EnclosureRepresentation<N, P>&)> predicate;
    // Upper bound on the next step size given the current enclosure.
    std::function<double(const IVec<N>&)> step_cap;
    // Stop with width_exceeded when any component is wider than this.
    std::array<double, N> max_width = filled(std::numeric_limits<double>::infinity());

private:
    static std::array<double, N> filled(double v)
    {
        std::array<double, N> a;
        a.fill(v);
        return a;
    }
};

template <class System, std::size_t P>
class Integrator {
public:
    static constexpr std::size_t N = System::N;
    using Rep = EnclosureRepresentation<N, P>;

    explicit Integrator(IntegratorOptions opts = {}) : opts_(opts) {}

    const IntegratorOptions& options() const { return opts_; }

    struct StepOutcome {
        Rep next;
        TaylorStep<N> info;
    };

    // One validated step from rep.t. The end time is min(rep.t + h, t_limit).
    // Returns nullopt (StepFailure) when no h >= h_min validates.
    std::optional<StepOutcome> step(const Rep& rep, double h_try,
                                    double t_limit = std::numeric_limits<double>::infinity()) const
    {
        const double t = rep.t;
        if (!(t > 0.0)) {
            throw SingularTime();
        }
        const IVec<N>& x0 = rep.bounds;
        const std::size_t p = opts_.order;
        double h = std::min(h_try, opts_.h_max);

        std::optional<IVec<N>> apriori;
        IVec<N> rem{};
        Interval hh;
        double t1 = t;
        for (;;) {
            if (!(h > 0.0)) {
                return std::nullopt;
            }
            t1 = t + h;
            if (t1 >= t_limit || t_limit - t1 < 1e-3 * h) {
                t1 = t_limit;
            }
            if (!(t1 > t)) {
                return std::nullopt;
            }
            hh = Interval(t1) - Interval(t);
            const Interval tspan(t, t1);
            apriori = validate_apriori(x0, tspan, hh);
            if (apriori) {
                const auto hi_series = System::template series<Interval>(*apriori, tspan, p + 1);
                const Interval hp = pow(hh, static_cast<int>(p + 1));
                bool ok = true;
                for (std::size_t i = 0; i < N; ++i) {
                    rem[i] = hi_series[p + 1][i] * hp;
                    if (rem[i].mag() > opts_.remainder_slack * opts_.tolerance * std::max(1.0, std::fabs(rep.center[i]))) {
                        ok = false;
                    }
                }
                if (ok) {
                    break;
                }
            }
            h = std::min(h, t1 - t) * opts_.backoff;
            if (h < opts_.h_min) {
                return std::nullopt;
            }
        }

        // Point part: Taylor polynomial at the center plus remainder.
        const auto cs = System::template series<Interval>(la::to_interval(rep.center), Interval(t), p);
        IVec<N> z;
        for (std::size_t i = 0; i < N; ++i) {
            Interval acc = cs[p][i];
            for (std::size_t j = p; j-- > 0;) {
                acc = acc * hh + cs[j][i];
            }
            z[i] = acc + rem[i];
        }

        // Jacobian of the Taylor polynomial over the current bounds.
        std::array<Grad<N>, N> gx;
        for (std::size_t i = 0; i < N; ++i) {
            gx[i] = Grad<N>::variable(x0[i], i);
        }
        const auto gs = System::template series<Grad<N>>(gx, Interval(t), p);
        IMat<N, N> jac;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                Interval acc = gs[p][i].d[k];
                for (std::size_t j = p; j-- > 0;) {
                    acc = acc * hh + gs[j][i].d[k];
                }
                jac[i][k] = acc;
            }
        }

        Rep next = lohner_update(rep, z, jac);
        next.t = t1;
        for (const auto& x : next.bounds) {
            if (!std::isfinite(x.lo()) || !std::isfinite(x.hi())) {
                return std::nullopt;
            }
        }

        // Direct mean-value evaluation as a second enclosure of the end state.
        IVec<N> direct = la::add(z, la::mul(jac, la::sub(x0, la::to_interval(rep.center))));
        next.bounds = la::intersect_or_first(la::intersect_or_first(next.bounds, direct), *apriori);

        StepOutcome out{std::move(next), {}};
        out.info.order = p;
        out.info.coeffs.assign(cs.begin(), cs.end());
        out.info.apriori = *apriori;
        out.info.remainder = rem;
        out.info.h = hh;
        out.info.t_begin = t;
        out.info.t_end = t1;
        return out;
    }

    // Step size suggestion from the last two Taylor coefficients at the center.
    double suggest_step(const Rep& rep) const
    {
        const std::size_t p = opts_.order;
        const auto cs = System::template series<Interval>(la::to_interval(rep.center), Interval(rep.t), p);
        double h = opts_.h_max;
        for (std::size_t i = 0; i < N; ++i) {
            const double tol = opts_.tolerance * std::max(1.0, std::fabs(rep.center[i]));
            for (std::size_t j : {p - 1, p}) {
                const double c = cs[j][i].mag();
                if (c > 0.0) {
                    h = std::min(h, std::pow(tol / c, 1.0 / static_cast<double>(j)));
                }
            }
        }
        return 0.9 * h;
    }

    Trajectory<N, P> integrate(const Rep& seed, const StopCondition<N, P>& stop) const
    {
        Trajectory<N, P> traj;
        traj.steps.push_back({seed.t, seed.t, seed.bounds, seed.bounds});
        traj.last = seed;
        if (!(seed.t < stop.t_end)) {
            traj.reason = StopReason::reached_time;
            return traj;
        }
        Rep rep = seed;
        double h_next = suggest_step(rep);
        for (std::size_t n = 0;; ++n) {
            if (n >= opts_.max_steps) {
                traj.reason = StopReason::max_steps;
                return traj;
            }
            double h = h_next;
            if (stop.step_cap) {
                h = std::min(h, stop.step_cap(rep.bounds));
            }
            auto out = step(rep, h, stop.t_end);
            if (!out) {
                traj.reason = StopReason::step_failure;
                return traj;
            }
            rep = std::move(out->next);
            traj.steps.push_back({out->info.t_begin, out->info.t_end, out->info.apriori, rep.bounds});
            traj.last = rep;
            for (std::size_t i = 0; i < N; ++i) {
                if (rep.bounds[i].width() > stop.max_width[i]) {
                    traj.reason = StopReason::width_exceeded;
                    return traj;
                }
            }
            if (stop.predicate && stop.predicate(traj, rep)) {
                traj.reason = StopReason::predicate;
                return traj;
            }
            if (rep.t >= stop.t_end) {
                traj.reason = StopReason::reached_time;
                return traj;
            }
            const double used = out->info.t_end - out->info.t_begin;
            h_next = std::min(suggest_step(rep), 2.0 * std::max(used, h));
        }
    }

private:
    // Constant-enclosure Picard test: Y with x0 + [0,h] F(Y, tspan) in Y.
    std::optional<IVec<N>> validate_apriori(const IVec<N>& x0, const Interval& tspan, const Interval& h) const
    {
        const Interval h0(0.0, h.hi());
        auto picard = [&](const IVec<N>& y) {
            const IVec<N> f = System::field(y, tspan);
            IVec<N> z;
            for (std::size_t i = 0; i < N; ++i) {
                z[i] = x0[i] + h0 * f[i];
            }
            return z;
        };
        auto widen = [](const IVec<N>& y) {
            IVec<N> r;
            for (std::size_t i = 0; i < N; ++i) {
                const double eps = 0.1 * y[i].width() + 1e-14 * (1.0 + y[i].mag());
                r[i] = inflate(y[i], eps);
            }
            return r;
        };
        try {
            IVec<N> y = widen(picard(x0));
            for (int iter = 0; iter < 4; ++iter) {
                const IVec<N> z = picard(y);
                if (la::subset(z, y)) {
                    return z;
                }
                y = widen(la::hull(y, z));
            }
        } catch (const InvalidInterval&) {
            return std::nullopt;
        }
        return std::nullopt;
    }

    Rep lohner_update(const Rep& rep, const IVec<N>& z, const IMat<N, N>& jac) const
    {
        Rep next;
        next.center = la::mid(z);
        const IVec<N> z_off = la::sub(z, la::to_interval(next.center));

        const IMat<N, P> ja = la::mul(jac, rep.param_matrix);
        next.param_matrix = la::mid(ja);
        next.param_box = rep.param_box;
        IMat<N, P> ja_err;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < P; ++k) {
                ja_err[i][k] = ja[i][k] - Interval(next.param_matrix[i][k]);
            }
        }
        const IVec<N> param_off = la::mul(ja_err, rep.param_box);

        const IMat<N, N> s = la::mul(jac, rep.transform);
        const Mat<N, N> sm = la::mid(s);

        std::optional<IMat<N, N>> inv;
        Mat<N, N> q{};
        if (opts_.wrapping == WrappingMode::parallelepiped) {
            q = sm;
            inv = la::enclose_inverse(q, la::approx_inverse(q));
        }
        if (!inv) {
            std::array<double, N> weights;
            for (std::size_t i = 0; i < N; ++i) {
                weights[i] = rep.box[i].width();
            }
            q = la::ordered_qr_basis(sm, weights);
            inv = la::enclose_inverse(q, la::transpose(q));
        }
        next.transform = q;
        if (!inv) {
            // Orthonormal Q always passes the residual test; keep a box fallback.
            next.transform = la::identity<N>();
            inv = IMat<N, N>{};
            for (std::size_t i = 0; i < N; ++i) {
                for (std::size_t k = 0; k < N; ++k) {
                    (*inv)[i][k] = Interval(i == k ? 1.0 : 0.0);
                }
            }
        }
        const IMat<N, N> qs = la::mul(*inv, s);
        IVec<N> r = la::mul(qs, rep.box);
        const IVec<N> extra = la::mul(*inv, la::add(z_off, param_off));
        next.box = la::add(r, extra);

        next.bounds = la::add(la::to_interval(next.center), next.offset_bounds());
        return next;
    }

    IntegratorOptions opts_;
};

// Trajectory as CSV: t_begin, t_end, then lo/hi of each component of the
// end-of-step box and of the a-priori box.
template <class System, std::size_t P>
void write_trajectory_csv(std::ostream& os, const Trajectory<System::N, P>& traj)
{
    constexpr std::size_t N = System::N;
    os.precision(17);
    os << "t_begin,t_end";
    for (std::size_t i = 0; i < N; ++i) {
        os << ',' << System::names[i] << "_lo," << System::names[i] << "_hi";
    }
    for (std::size_t i = 0; i < N; ++i) {
        os << ",apriori_" << System::names[i] << "_lo,apriori_" << System::names[i] << "_hi";
    }
    os << '\n';
    for (const auto& s : traj.steps) {
        os << s.t_begin << ',' << s.t_end;
        for (const auto& x : s.end) {
            os << ',' << x.lo() << ',' << x.hi();
        }
        for (const auto& x : s.apriori) {
            os << ',' << x.lo() << ',' << x.hi();
        }
        os << '\n';
    }
}

using MainIntegrator = Integrator<MainSystem, 1>;
using ScaledIntegrator = Integrator<ScaledSystem, 1>;

} // namespace rprove
