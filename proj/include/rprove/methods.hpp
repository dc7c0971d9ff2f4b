#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rprove/desingularize.hpp"
#include "rprove/dynamics.hpp"
#include "rprove/errors.hpp"
#include "rprove/integrator.hpp"
#include "rprove/interval.hpp"

namespace rprove {

enum class Method { fall, bound_state_good, infty_crosses_many };
enum class Status { proved, failed };

inline const char* to_string(Method m)
{
    switch (m) {
    case Method::fall:
        return "FALL";
    case Method::bound_state_good:
        return "BOUNDSTATEGOOD";
    case Method::infty_crosses_many:
        return "INFTYCROSSESMANY";
    }
    return "UNKNOWN";
}

inline std::optional<Method> method_from_string(const std::string& s)
{
    for (Method m : {Method::fall, Method::bound_state_good, Method::infty_crosses_many}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

inline const char* to_string(Status s) { return s == Status::proved ? "Proved" : "Failed"; }

struct MethodConfig {
    IntegratorOptions integrator{};
    // Nominal start time; the provers start at min(t0.hi, tstar_fraction * t*).
    Interval t0{0.1, 0.101};
    double tstar_fraction = 0.1;
    double fall_t_max = 60.0;
    double bsg_t_max = 50.0;
    // Sub-interval width for the common-time subdivision in BOUNDSTATEGOOD.
    double bsg_piece_width = 0.005;
    std::size_t bsg_max_pieces = 256;
    double infty_s_max = 2000.0;
    int max_depth = 60;
    std::size_t max_leaves = 20000;
    // A leaf whose y (or w) box gets wider than this is abandoned and bisected.
    double max_position_width = 1.0;
};

// Result of integrating one sub-interval.
struct LeafWitness {
    Interval interval;
    double T = 0.0;
    std::vector<Interval> state;
    Interval energy;
    int crossings = 0;
    bool exact = false;
    bool proved = false;
    std::string note;
};

struct Witness {
    double T = 0.0;
    std::vector<Interval> state; // hull over leaves
    int crossings = -1;          // common crossing count of all leaves, -1 if they differ
    std::size_t subdivisions = 0;
    std::vector<LeafWitness> leaves;
};

struct MethodResult {
    Interval interval;
    Method method = Method::fall;
    int index = -1;
    Status status = Status::failed;
    std::string reason;
    Witness witness;

    bool proved() const { return status == Status::proved; }
};

// Trap conditions for a state approaching zero from above at time T:
// 0 <= y < 1/2, v < 0, 0 < E < 1/4 and E (T - 2 ln E + 3/2) < 3/8.
inline bool check_trap(const Interval& y, const Interval& v, const Interval& e, const Interval& t)
{
    if (!(y.lo() >= 0.0 && y.hi() < 0.5 && v.hi() < 0.0)) {
        return false;
    }
    if (!(e.lo() > 0.0 && e.hi() < 0.25 && t.lo() >= 0.0)) {
        return false;
    }
    // On 0 < E < 1/4 the left side is increasing in E and in T.
    try {
        const Interval eh(e.hi());
        const Interval th(t.hi());
        const Interval g = eh * (th - Interval(2.0) * log(eh) + Interval(1.5));
        return g.hi() < 0.375;
    } catch (const Error&) {
        return false;
    }
}

namespace method_detail {

inline std::vector<Interval> to_vector(const IVec<4>& x) { return {x[0], x[1], x[2], x[3]}; }
inline std::vector<Interval> to_vector(const IVec<3>& x) { return {x[0], x[1]}; }

inline std::vector<Interval> hull(const std::vector<Interval>& a, const std::vector<Interval>& b)
{
    if (a.empty()) {
        return b;
    }
    std::vector<Interval> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = rprove::hull(a[i], b[i]);
    }
    return r;
}

inline void summarize(Witness& w)
{
    w.state.clear();
    w.T = 0.0;
    w.crossings = w.leaves.empty() ? -1 : w.leaves.front().crossings;
    for (const auto& l : w.leaves) {
        w.state = hull(w.state, l.state);
        w.T = std::max(w.T, l.T);
        if (l.crossings != w.crossings) {
            w.crossings = -1;
        }
    }
    w.subdivisions = w.leaves.size();
}

inline std::array<double, 4> main_width_limits(const MethodConfig& cfg)
{
    const double inf = std::numeric_limits<double>::infinity();
    return {cfg.max_position_width, 4.0 * cfg.max_position_width, inf, inf};
}

// Depth-first bisection driver shared by FALL and INFTYCROSSESMANY. The
// first leaf that fails at maximum depth aborts the search.
template <class Leaf>
bool bisect_prove(const Interval& iv, int depth, const MethodConfig& cfg, Leaf&& leaf, std::vector<LeafWitness>& out,
                  std::string& reason)
{
    LeafWitness w = leaf(iv);
    if (w.proved) {
        out.push_back(std::move(w));
        return true;
    }
    if (depth >= cfg.max_depth) {
        reason = "DepthExceeded at [" + std::to_string(iv.lo()) + ", " + std::to_string(iv.hi()) + "]: " + w.note;
        out.push_back(std::move(w));
        return false;
    }
    if (out.size() >= cfg.max_leaves) {
        reason = "leaf budget exhausted";
        return false;
    }
    const auto [left, right] = bisect(iv);
    if (left.hi() <= left.lo() || right.hi() <= right.lo()) {
        reason = "interval cannot be bisected further: " + w.note;
        out.push_back(std::move(w));
        return false;
    }
    return bisect_prove(left, depth + 1, cfg, leaf, out, reason) &&
           bisect_prove(right, depth + 1, cfg, leaf, out, reason);
}

inline double start_time(const Interval& b, const MethodConfig& cfg)
{
    return start_time_main(b, cfg.t0.hi(), cfg.tstar_fraction);
}

// One FALL attempt on an unsplit interval.
inline LeafWitness fall_leaf(const Interval& b, const MethodConfig& cfg)
{
    LeafWitness w;
    w.interval = b;
    const MainIntegrator integ(cfg.integrator);
    const auto seed = EnclosureRepresentation<4, 1>::from(initial_set_main(b, start_time(b, cfg)));
    CrossingCounter<4> counter(0, 1, main_speed_bound);
    try {
        counter.start(seed.t, seed.bounds);
    } catch (const AmbiguousSign&) {
        w.note = "seed y box contains zero";
        return w;
    }
    Interval e_last = energy(seed);
    StopCondition<4, 1> stop;
    stop.t_end = cfg.fall_t_max;
    stop.step_cap = careful_step_cap;
    stop.max_width = main_width_limits(cfg);
    stop.predicate = [&](const Trajectory<4, 1>& tr, const EnclosureRepresentation<4, 1>& rep) {
        counter.consume(tr.steps.back());
        if (!counter.exact()) {
            return true;
        }
        e_last = energy(rep);
        return e_last.hi() < 0.0 && !counter.run_open() && rep.bounds[0].sign() != 0;
    };
    const auto tr = integ.integrate(seed, stop);
    w.T = tr.last.t;
    w.state = to_vector(tr.last.bounds);
    w.energy = e_last;
    w.crossings = counter.count();
    w.exact = counter.exact();
    if (tr.reason != StopReason::predicate) {
        w.note = std::string("integration stopped: ") + to_string(tr.reason);
    } else if (!counter.exact()) {
        w.note = "crossing count not certified";
    } else {
        w.proved = true;
    }
    return w;
}

inline LeafWitness infty_leaf(const Interval& beta, int n, const MethodConfig& cfg)
{
    LeafWitness w;
    w.interval = beta;
    const ScaledIntegrator integ(cfg.integrator);
    const auto seed = EnclosureRepresentation<3, 1>::from(initial_set_scaled(beta, cfg.t0.hi()));
    CrossingCounter<3> counter(0, 1);
    counter.start(seed.t, seed.bounds);
    StopCondition<3, 1> stop;
    stop.t_end = cfg.infty_s_max;
    stop.max_width = {cfg.max_position_width, 4.0 * cfg.max_position_width, std::numeric_limits<double>::infinity()};
    stop.predicate = [&](const Trajectory<3, 1>& tr, const EnclosureRepresentation<3, 1>&) {
        counter.consume(tr.steps.back());
        return counter.count() >= n + 1;
    };
    const auto tr = integ.integrate(seed, stop);
    w.T = tr.last.t;
    w.state = to_vector(tr.last.bounds);
    w.energy = scaled_energy(tr.last.bounds[0], tr.last.bounds[1], tr.last.bounds[2]);
    w.crossings = counter.count();
    w.exact = false;
    if (tr.reason == StopReason::predicate) {
        w.proved = true;
    } else {
        w.note = std::string("integration stopped: ") + to_string(tr.reason) + " after " +
                 std::to_string(counter.count()) + " sign changes";
    }
    return w;
}

// A sub-interval of a BOUNDSTATEGOOD run, advanced in lockstep with the
// others so that every piece is examined at the same times.
struct Piece {
    Interval b;
    EnclosureRepresentation<4, 1> rep;
    CrossingCounter<4> counter{0, 1, main_speed_bound};
    double h_next = 0.0;
    std::size_t steps = 0;
};

// Advances a piece to exactly `target`; false when a step cannot be validated.
inline bool advance_to(const MainIntegrator& integ, Piece& pc, double target)
{
    while (pc.rep.t < target) {
        if (pc.steps >= integ.options().max_steps) {
            return false;
        }
        const double h = std::min(pc.h_next, careful_step_cap(pc.rep.bounds));
        auto out = integ.step(pc.rep, h, target);
        if (!out) {
            return false;
        }
        pc.counter.consume({out->info.t_begin, out->info.t_end, out->info.apriori, out->next.bounds});
        pc.rep = std::move(out->next);
        ++pc.steps;
        const double used = out->info.t_end - out->info.t_begin;
        pc.h_next = std::min(integ.suggest_step(pc.rep), 2.0 * std::max(used, h));
    }
    return true;
}

enum class PieceVerdict { pending, good, hopeless };

// Conditions of BOUNDSTATEGOOD for one piece at its current time.
inline PieceVerdict judge_piece(const Piece& pc, int n)
{
    const auto& x = pc.rep.bounds;
    const Interval e = energy(pc.rep);
    if (pc.counter.count() > n || e.hi() < 0.0) {
        return PieceVerdict::hopeless;
    }
    if (!pc.counter.exact()) {
        return PieceVerdict::hopeless;
    }
    if (pc.counter.run_open() || pc.counter.count() != n) {
        return PieceVerdict::pending;
    }
    const Interval s((n % 2 == 0) ? 1.0 : -1.0);
    const Interval y = s * x[0];
    const Interval v = s * x[1];
    const Interval d = s * x[2];
    const Interval vd = s * x[3];
    const bool ok = y.lo() > 0.0 && y.hi() <= constants::inv_sqrt3().lo() && v.hi() < 0.0 && d.hi() < 0.0 &&
                    vd.hi() < 0.0 && check_trap(y, v, e, Interval(pc.rep.t));
    return ok ? PieceVerdict::good : PieceVerdict::pending;
}

struct BsgAttempt {
    bool proved = false;
    bool hopeless = false; // a piece certified more than n crossings or negative energy
    std::string note;
    double T = 0.0;
    std::vector<LeafWitness> leaves;
};

inline BsgAttempt bsg_attempt(const Interval& b, int n, std::size_t pieces, const MethodConfig& cfg)
{
    BsgAttempt res;
    const MainIntegrator integ(cfg.integrator);
    const double ts = start_time(b, cfg);
    std::vector<Piece> ps;
    ps.reserve(pieces);
    Interval rest = b;
    for (std::size_t i = 0; i < pieces; ++i) {
        Interval part = rest;
        if (i + 1 < pieces) {
            const double cut = b.lo() + (b.hi() - b.lo()) * static_cast<double>(i + 1) / static_cast<double>(pieces);
            if (!(cut > rest.lo() && cut < rest.hi())) {
                continue;
            }
            part = Interval(rest.lo(), cut);
            rest = Interval(cut, rest.hi());
        }
        Piece pc;
        pc.b = part;
        pc.rep = EnclosureRepresentation<4, 1>::from(initial_set_main(part, ts));
        pc.counter.start(pc.rep.t, pc.rep.bounds);
        pc.h_next = integ.suggest_step(pc.rep);
        ps.push_back(std::move(pc));
    }

    auto record = [&](bool proved) {
        for (const auto& pc : ps) {
            LeafWitness w;
            w.interval = pc.b;
            w.T = pc.rep.t;
            w.state = to_vector(pc.rep.bounds);
            w.energy = energy(pc.rep);
            w.crossings = pc.counter.count();
            w.exact = pc.counter.exact();
            w.proved = proved;
            res.leaves.push_back(std::move(w));
        }
    };

    double t = ts;
    while (t < cfg.bsg_t_max) {
        double h = std::numeric_limits<double>::infinity();
        for (const auto& pc : ps) {
            h = std::min({h, pc.h_next, careful_step_cap(pc.rep.bounds)});
        }
        const double target = std::min(cfg.bsg_t_max, t + h);
        bool all_good = true;
        for (auto& pc : ps) {
            if (!advance_to(integ, pc, target)) {
                res.note = "step failure near t=" + std::to_string(pc.rep.t);
                record(false);
                return res;
            }
            if (pc.rep.bounds[0].width() > cfg.max_position_width) {
                res.note = "enclosure too wide near t=" + std::to_string(pc.rep.t);
                record(false);
                return res;
            }
            const PieceVerdict v = judge_piece(pc, n);
            if (v == PieceVerdict::hopeless) {
                res.hopeless = pc.counter.exact() || pc.counter.count() > n;
                res.note = pc.counter.count() > n ? "crossing count exceeds " + std::to_string(n)
                           : !pc.counter.exact() ? "crossing count not certified"
                                                 : "energy negative before the conditions held";
                record(false);
                return res;
            }
            all_good = all_good && v == PieceVerdict::good;
        }
        t = target;
        if (all_good) {
            res.proved = true;
            res.T = t;
            record(true);
            return res;
        }
    }
    res.note = "ConditionsNotMet(T_max=" + std::to_string(cfg.bsg_t_max) + ")";
    record(false);
    return res;
}

} // namespace method_detail

// Proves that every solution with seed in b eventually has negative energy,
// recording the exact crossing count before trapping.
inline MethodResult fall(const Interval& b, const MethodConfig& cfg = {}, int depth = 0)
{
    detail::require_seed_above_sqrt2(b);
    MethodResult r;
    r.interval = b;
    r.method = Method::fall;
    const bool ok = method_detail::bisect_prove(
        b, depth, cfg, [&](const Interval& piece) { return method_detail::fall_leaf(piece, cfg); }, r.witness.leaves,
        r.reason);
    r.status = ok ? Status::proved : Status::failed;
    method_detail::summarize(r.witness);
    return r;
}

// At most one n-th bound state and no other bound states with seed in b.
// The interval is split into pieces that are all examined at a common time
// T; the piece count doubles when the enclosures are too coarse.
inline MethodResult bound_state_good(const Interval& b, int n, const MethodConfig& cfg = {})
{
    detail::require_seed_above_sqrt2(b);
    if (n < 0) {
        throw DomainError("bound state index must be nonnegative");
    }
    MethodResult r;
    r.interval = b;
    r.method = Method::bound_state_good;
    r.index = n;
    const double want = std::ceil(b.width() / cfg.bsg_piece_width);
    std::size_t pieces = static_cast<std::size_t>(std::clamp(want, 1.0, static_cast<double>(cfg.bsg_max_pieces)));
    for (;;) {
        auto att = method_detail::bsg_attempt(b, n, pieces, cfg);
        r.witness.leaves = std::move(att.leaves);
        method_detail::summarize(r.witness);
        if (att.proved) {
            r.status = Status::proved;
            r.witness.T = att.T;
            r.reason.clear();
            return r;
        }
        r.reason = att.note;
        if (att.hopeless || pieces >= cfg.bsg_max_pieces) {
            r.status = Status::failed;
            return r;
        }
        pieces = std::min(2 * pieces, cfg.bsg_max_pieces);
    }
}

// At least n + 1 sign changes of w for every beta in the interval, hence at
// least n + 1 zero crossings of y_b for every b >= 1 / beta.hi.
inline MethodResult infty_crosses_many(const Interval& beta, int n, const MethodConfig& cfg = {}, int depth = 0)
{
    if (beta.lo() < 0.0) {
        throw BetaRangeError("beta must be nonnegative");
    }
    if (!(beta.hi() <= detail::one_tenth().lo())) {
        throw BetaRangeError("beta exceeds 1/10");
    }
    MethodResult r;
    r.interval = beta;
    r.method = Method::infty_crosses_many;
    r.index = n;
    const bool ok = method_detail::bisect_prove(
        beta, depth, cfg, [&](const Interval& piece) { return method_detail::infty_leaf(piece, n, cfg); },
        r.witness.leaves, r.reason);
    r.status = ok ? Status::proved : Status::failed;
    method_detail::summarize(r.witness);
    return r;
}

} // namespace rprove
