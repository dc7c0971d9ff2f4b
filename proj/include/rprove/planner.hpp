#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "rprove/errors.hpp"
#include "rprove/hexfloat.hpp"
#include "rprove/interval.hpp"
#include "rprove/methods.hpp"

namespace rprove {

// Non-rigorous planning. Nothing here affects soundness: every interval it
// proposes is verified by the rigorous methods, and the cover is re-checked.

struct FloatSample {
    double t, y, vy, delta, vdelta;
};

struct FloatTrajectory {
    std::vector<FloatSample> samples;
    int crossings = 0;
    bool trapped = false; // stopped early with energy below the trap threshold
    FloatSample last{};
};

struct FloatSolveOptions {
    bool keep_samples = true;
    bool stop_when_trapped = false;
    double trap_energy = -0.01;
};

namespace planner_detail {

using State = std::array<double, 4>;

inline State rhs(const State& x, double t)
{
    const double y = x[0];
    return {x[1], -2.0 / t * x[1] - (y * y * y - y), x[3], -2.0 / t * x[3] - (3.0 * y * y - 1.0) * x[2]};
}

inline State axpy(const State& x, double h, const State& k)
{
    return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]};
}

// Even power series of the solution and of d/db near t = 0, through t^4.
inline State series_start(double b, double t)
{
    const double f = b * b * b - b;
    const double fp = 3.0 * b * b - 1.0;
    const double fpp = 6.0 * b;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t2 * t2;
    const double d4 = (fp * fp + f * fpp) / 120.0;
    return {b - f * t2 / 6.0 + f * fp * t4 / 120.0, -f * t / 3.0 + f * fp * t3 / 30.0, 1.0 - fp * t2 / 6.0 + d4 * t4,
            -fp * t / 3.0 + 4.0 * d4 * t3};
}

inline double float_energy(double y, double v) { return 0.5 * v * v + 0.25 * y * y * y * y - 0.5 * y * y; }

} // namespace planner_detail

// Fixed-step RK4 on the 4-variable system, started from the power series at
// a small time.
inline FloatTrajectory float_solve(double b, double T, double dt, const FloatSolveOptions& opt = {})
{
    using namespace planner_detail;
    if (!(b > 0.0) || !(dt > 0.0)) {
        throw DomainError("float_solve needs b > 0 and dt > 0");
    }
    FloatTrajectory out;
    double t = std::min(dt, 0.01 / std::max(1.0, b));
    State x = series_start(b, t);
    auto emit = [&]() {
        out.last = {t, x[0], x[1], x[2], x[3]};
        if (opt.keep_samples) {
            out.samples.push_back(out.last);
        }
    };
    emit();
    int sign = x[0] > 0 ? 1 : (x[0] < 0 ? -1 : 0);
    while (t < T) {
        const double h = std::min(dt, T - t);
        const State k1 = rhs(x, t);
        const State k2 = rhs(axpy(x, h / 2, k1), t + h / 2);
        const State k3 = rhs(axpy(x, h / 2, k2), t + h / 2);
        const State k4 = rhs(axpy(x, h, k3), t + h);
        for (std::size_t i = 0; i < 4; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        const int s = x[0] > 0 ? 1 : (x[0] < 0 ? -1 : 0);
        if (s != 0) {
            if (sign != 0 && s != sign) {
                ++out.crossings;
            }
            sign = s;
        }
        emit();
        if (opt.stop_when_trapped && float_energy(x[0], x[1]) < opt.trap_energy) {
            out.trapped = true;
            break;
        }
    }
    return out;
}

struct PlannerOptions {
    double count_T = 30.0;
    double dt = 0.0; // 0: min(1e-3, 0.02 / b)
    double tolerance = 1e-6;
    // The bracket, widened by this margin, must survive halving dt.
    double stability_margin = 1e-4;
    double probe_width = 0.5;
    double min_probe_width = 1e-4;
    // Probes wider than this are skipped: the accepted interval localizes b_k.
    double max_bsg_width = 0.2;
    double buffer = 2.0;
    double max_overlap = 0.01;
};

inline double planner_dt(double b, const PlannerOptions& opt)
{
    return opt.dt > 0.0 ? opt.dt : std::min(1e-3, 0.02 / std::max(1.0, b));
}

inline int float_crossings(double b, double dt, const PlannerOptions& opt)
{
    FloatSolveOptions fo;
    fo.keep_samples = false;
    fo.stop_when_trapped = true;
    return float_solve(b, opt.count_T, dt, fo).crossings;
}

// Approximate seeds b_0 < ... < b_N of the first N+1 bound states, by
// bisection on the float crossing count.
inline std::vector<double> locate_bound_states(int n, const PlannerOptions& opt = {})
{
    if (n < 0) {
        throw DomainError("number of excited states must be nonnegative");
    }
    std::vector<double> out;
    double lo = constants::sqrt2().hi() + 0.01;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            lo = out.back() + 0.1;
        }
        auto above = [&](double b, double dt) { return float_crossings(b, dt, opt) > k; };
        if (above(lo, planner_dt(lo, opt))) {
            throw OracleAmbiguous("bracket start already has more than " + std::to_string(k) + " crossings");
        }
        double hi = lo * 1.5;
        while (!above(hi, planner_dt(hi, opt))) {
            lo = hi;
            hi *= 1.5;
            if (hi > 1e6) {
                throw OracleAmbiguous("no bracket found for bound state " + std::to_string(k));
            }
        }
        while (hi - lo > opt.tolerance) {
            const double mid = 0.5 * (lo + hi);
            (above(mid, planner_dt(mid, opt)) ? hi : lo) = mid;
        }
        const double a = lo - opt.stability_margin;
        const double c = hi + opt.stability_margin;
        if (above(a, 0.5 * planner_dt(a, opt)) || !above(c, 0.5 * planner_dt(c, opt))) {
            throw OracleAmbiguous("crossing count unstable under step refinement near b=" + std::to_string(lo));
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

struct PlanSegment {
    Interval b;
    Method method = Method::fall;
    int index = -1; // bound-state index for BOUNDSTATEGOOD
};

struct ProofPlan {
    int n_states = 0; // N: states 0..N
    std::vector<PlanSegment> segments;
    Interval beta{0.0, 0.1};
    std::vector<double> approx_b;
    double dt = 0.0;
};

// Shrinks a BOUNDSTATEGOOD interval around b_k by halving until the
// rigorous method succeeds.
inline Interval probe_bound_state(double bk, int k, const MethodConfig& cfg, const PlannerOptions& opt)
{
    for (double w = opt.probe_width; w >= opt.min_probe_width; w *= 0.5) {
        const Interval iv(bk - 0.5 * w, bk + 0.5 * w);
        if (w > opt.max_bsg_width || iv.lo() < constants::sqrt2().hi()) {
            continue;
        }
        if (bound_state_good(iv, k, cfg).proved()) {
            return iv;
        }
    }
    throw PlanningFailure("BOUNDSTATEGOOD did not succeed around b=" + std::to_string(bk) +
                          " at the minimum probe width");
}

inline ProofPlan plan_from_bound_state_intervals(int n, const std::vector<Interval>& bsg, const PlannerOptions& opt = {})
{
    ProofPlan plan;
    plan.n_states = n;
    double prev_hi = constants::sqrt2().lo();
    bool first = true;
    for (int k = 0; k <= n; ++k) {
        const Interval& iv = bsg[static_cast<std::size_t>(k)];
        const double ov = std::min(opt.max_overlap, 0.25 * iv.width());
        const double lo = first ? prev_hi : prev_hi - ov;
        plan.segments.push_back({Interval(lo, iv.lo() + ov), Method::fall, -1});
        plan.segments.push_back({iv, Method::bound_state_good, k});
        prev_hi = iv.hi();
        first = false;
    }
    const double ov = std::min(opt.max_overlap, 0.25 * bsg.back().width());
    // 1/hi must stay below 1/10 for the rescaled equation.
    const double hi = std::max(prev_hi + opt.buffer, 10.01);
    plan.segments.push_back({Interval(prev_hi - ov, hi), Method::fall, -1});
    plan.beta = Interval(0.0, (Interval(1.0) / Interval(hi)).hi());
    return plan;
}

inline ProofPlan build_plan(int n, const MethodConfig& cfg = {}, const PlannerOptions& opt = {})
{
    const auto bks = locate_bound_states(n, opt);
    std::vector<Interval> bsg;
    for (int k = 0; k <= n; ++k) {
        bsg.push_back(probe_bound_state(bks[static_cast<std::size_t>(k)], k, cfg, opt));
    }
    ProofPlan plan = plan_from_bound_state_intervals(n, bsg, opt);
    plan.approx_b = bks;
    plan.dt = opt.dt;
    return plan;
}

inline nlohmann::json to_json(const ProofPlan& p)
{
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : p.segments) {
        nlohmann::json j{{"lo", to_hex(s.b.lo())}, {"hi", to_hex(s.b.hi())}, {"method", to_string(s.method)}};
        if (s.method == Method::bound_state_good) {
            j["index"] = s.index;
        }
        segs.push_back(std::move(j));
    }
    return {{"version", 1},
            {"n_states", p.n_states},
            {"segments", segs},
            {"beta", interval_json(p.beta)},
            {"planner", {{"approx_b", p.approx_b}, {"dt", p.dt}}}};
}

inline ProofPlan plan_from_json(const nlohmann::json& j)
{
    ProofPlan p;
    p.n_states = j.at("n_states").get<int>();
    for (const auto& s : j.at("segments")) {
        PlanSegment seg;
        seg.b = Interval(from_hex(s.at("lo").get<std::string>()), from_hex(s.at("hi").get<std::string>()));
        const auto m = method_from_string(s.at("method").get<std::string>());
        if (!m || *m == Method::infty_crosses_many) {
            throw DomainError("unknown b-segment method '" + s.at("method").get<std::string>() + "'");
        }
        seg.method = *m;
        seg.index = s.value("index", -1);
        p.segments.push_back(seg);
    }
    p.beta = interval_from_json(j.at("beta"));
    if (j.contains("planner")) {
        p.approx_b = j["planner"].value("approx_b", std::vector<double>{});
        p.dt = j["planner"].value("dt", 0.0);
    }
    return p;
}

} // namespace rprove
