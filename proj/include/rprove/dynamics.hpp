#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "rprove/errors.hpp"
#include "rprove/integrator.hpp"
#include "rprove/interval.hpp"

namespace rprove {

// E = v^2/2 + V(y), V(y) = y^4/4 - y^2/2 = ((y^2 - 1)^2 - 1)/4.
inline Interval energy(const Interval& y, const Interval& v)
{
    const Interval pot = (sqr(sqr(y) - Interval(1.0)) - Interval(1.0)) / Interval(4.0);
    return sqr(v) / Interval(2.0) + pot;
}

// Energy of the rescaled equation, V_beta(w) = w^4/4 - beta^2 w^2/2.
inline Interval scaled_energy(const Interval& w, const Interval& v, const Interval& beta)
{
    const Interval b2 = sqr(beta);
    const Interval pot = (sqr(sqr(w) - b2) - sqr(b2)) / Interval(4.0);
    return sqr(v) / Interval(2.0) + pot;
}

// Energy over a Lohner set, centered form: E(c) + grad E(bounds) . (x - c)
// with x - c = A p + Q r kept symbolic. Intersected with the box value.
template <std::size_t P>
Interval energy(const EnclosureRepresentation<4, P>& rep)
{
    const Interval box_e = energy(rep.bounds[0], rep.bounds[1]);
    const Interval yc(rep.center[0]);
    const Interval vc(rep.center[1]);
    const Interval ec = energy(yc, vc);
    const Interval& yb = rep.bounds[0];
    const std::array<Interval, 2> grad = {pow(yb, 3) - yb, rep.bounds[1]};
    Interval acc = ec;
    for (std::size_t k = 0; k < P; ++k) {
        const Interval coef = grad[0] * Interval(rep.param_matrix[0][k]) + grad[1] * Interval(rep.param_matrix[1][k]);
        acc += coef * rep.param_box[k];
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const Interval coef = grad[0] * Interval(rep.transform[0][k]) + grad[1] * Interval(rep.transform[1][k]);
        acc += coef * rep.box[k];
    }
    return intersect(acc, box_e).value_or(box_e);
}

// Upper bound on |y'| for all later times: E(t) <= E0 and V >= -1/4.
inline double max_speed(const Interval& e0)
{
    const double s = rounding::add_up(rounding::mul_up(2.0, e0.hi()), 0.5);
    if (s <= 0.0) {
        return 0.0;
    }
    return rounding::sqrt_up(s);
}

// Two zeros inside one step need a turning point with |y| > sqrt(2), i.e.
// travel of more than 2 sqrt(2); h * v_max <= 2 rules that out.
inline bool certify_no_double_cross(double h, double v_max)
{
    if (v_max == 0.0) {
        return true;
    }
    return rounding::mul_up(h, v_max) <= 2.0;
}

// Step cap enforcing certify_no_double_cross from the current energy bound.
inline double careful_step_cap(const IVec<4>& bounds)
{
    const double vmax = max_speed(energy(bounds[0], bounds[1]));
    if (vmax == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return rounding::div_down(2.0, vmax);
}

struct CrossingCount {
    int count = 0;
    bool exact = true;
    int last_sign = 1;
};

// Incremental zero-crossing counter over trajectory steps.
//
// Steps are grouped into runs between consecutive step ends whose position
// box excludes zero. A run holds no crossing when every a-priori position
// box in it excludes zero, and at most one crossing when the a-priori
// velocity keeps a strict sign throughout the run or when (run duration) *
// (speed bound at run start) <= 2. In those cases the parity of the end
// signs gives the exact number of crossings in the run.
template <std::size_t N>
class CrossingCounter {
public:
    using SpeedBound = std::function<double(const IVec<N>&)>;

    CrossingCounter(std::size_t pos, std::size_t vel, SpeedBound speed = {})
        : pos_(pos), vel_(vel), speed_(std::move(speed))
    {
    }

    void start(double t, const IVec<N>& box)
    {
        last_sign_ = box[pos_].sign();
        if (last_sign_ == 0) {
            throw AmbiguousSign("seed position box contains zero");
        }
        reset_run(t, box);
    }

    void consume(const StepRecord<N>& s)
    {
        if (s.t_end == s.t_begin) {
            return;
        }
        run_duration_ = rounding::add_up(run_duration_, rounding::sub_up(s.t_end, s.t_begin));
        if (s.apriori[pos_].sign() != last_sign_) {
            run_excludes_zero_ = false;
        }
        const int vs = s.apriori[vel_].sign();
        if (run_steps_ == 0) {
            run_vel_sign_ = vs;
        } else if (vs != run_vel_sign_) {
            run_vel_sign_ = 0;
        }
        ++run_steps_;

        const int es = s.end[pos_].sign();
        if (es == 0) {
            return;
        }
        const bool changed = es != last_sign_;
        bool certified = run_vel_sign_ != 0 || (!changed && run_excludes_zero_);
        if (!certified && speed_) {
            certified = certify_no_double_cross(run_duration_, run_speed_);
        }
        if (changed) {
            ++count_;
        }
        if (!certified) {
            exact_ = false;
        }
        last_sign_ = es;
        reset_run(s.t_end, s.end);
    }

    // Crossings in closed runs (a lower bound on sign changes; exact when exact()).
    int count() const { return count_; }
    bool exact() const { return exact_; }
    bool run_open() const { return run_steps_ > 0; }
    int last_sign() const { return last_sign_; }

    CrossingCount result() const { return {count_, exact_, last_sign_}; }

private:
    void reset_run(double, const IVec<N>& box)
    {
        run_duration_ = 0.0;
        run_steps_ = 0;
        run_excludes_zero_ = true;
        run_vel_sign_ = 0;
        run_speed_ = speed_ ? speed_(box) : std::numeric_limits<double>::infinity();
    }

    std::size_t pos_;
    std::size_t vel_;
    SpeedBound speed_;
    int count_ = 0;
    bool exact_ = true;
    int last_sign_ = 1;
    double run_duration_ = 0.0;
    std::size_t run_steps_ = 0;
    bool run_excludes_zero_ = true;
    int run_vel_sign_ = 0;
    double run_speed_ = std::numeric_limits<double>::infinity();
};

inline double main_speed_bound(const IVec<4>& box) { return max_speed(energy(box[0], box[1])); }

// Exact crossing count of y along a main-system trajectory.
template <std::size_t P>
CrossingCount count_crossings(const Trajectory<4, P>& traj)
{
    CrossingCounter<4> counter(0, 1, main_speed_bound);
    counter.start(traj.steps.front().t_end, traj.steps.front().end);
    for (std::size_t i = 1; i < traj.steps.size(); ++i) {
        counter.consume(traj.steps[i]);
    }
    if (counter.run_open()) {
        throw AmbiguousSign("position box contains zero at the end of the trajectory");
    }
    return counter.result();
}

} // namespace rprove
