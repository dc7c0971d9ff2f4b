#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rprove/errors.hpp"
#include "rprove/hexfloat.hpp"
#include "rprove/interval.hpp"
#include "rprove/methods.hpp"
#include "rprove/planner.hpp"

namespace rprove {

struct OverlapRecord {
    std::size_t left = 0;
    Interval overlap;
};

struct CoverCheck {
    bool passed = false;
    bool starts_at_sqrt2 = false;
    std::vector<OverlapRecord> overlaps;
    double last_hi = 0.0;
    double inv_last_hi = 0.0; // upper bound on 1/last_hi
    bool junction = false;
    std::string failure;
    std::size_t failure_position = 0;
};

// Checks that the plan covers [sqrt 2, oo): segments start at or below
// sqrt 2, adjacent segments overlap with positive width, and the beta
// interval covers every b beyond the last segment.
inline CoverCheck check_cover(const ProofPlan& plan)
{
    CoverCheck c;
    const auto& seg = plan.segments;
    auto fail = [&](std::size_t pos, std::string what) {
        c.passed = false;
        c.failure = std::move(what);
        c.failure_position = pos;
        return c;
    };
    if (seg.empty()) {
        return fail(0, "plan has no b-segments");
    }
    c.starts_at_sqrt2 = seg[0].b.lo() <= constants::sqrt2().lo();
    if (!c.starts_at_sqrt2) {
        return fail(0, "first segment starts above sqrt(2) at " + std::to_string(seg[0].b.lo()));
    }
    double reach = seg[0].b.hi();
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
        const Interval& a = seg[k].b;
        const Interval& b = seg[k + 1].b;
        const double lo = std::max(a.lo(), b.lo());
        const double hi = std::min(a.hi(), b.hi());
        if (!(lo < hi) || !(b.lo() < reach)) {
            std::ostringstream os;
            os << "gap after segment " << k << " at " << std::setprecision(17) << a.hi();
            return fail(k, os.str());
        }
        c.overlaps.push_back({k, Interval(lo, hi)});
        reach = std::max(reach, b.hi());
    }
    c.last_hi = reach;
    c.inv_last_hi = (Interval(1.0) / Interval(reach)).hi();
    c.junction = plan.beta.lo() <= 0.0 && c.inv_last_hi <= plan.beta.hi();
    if (!c.junction) {
        return fail(seg.size() - 1, "beta interval does not reach 1/" + std::to_string(reach));
    }
    if (!(plan.beta.hi() <= detail::one_tenth().lo())) {
        return fail(seg.size() - 1, "beta interval exceeds 1/10");
    }
    c.passed = true;
    return c;
}

inline CoverCheck verify_cover(const ProofPlan& plan)
{
    CoverCheck c = check_cover(plan);
    if (!c.passed) {
        throw CoverGap(c.failure_position, c.failure);
    }
    return c;
}

struct Conclusion {
    int state = 0;
    Interval interval;
    bool unique = false;
    std::string basis;
};

struct ProofCertificate {
    int n_states = 0;
    ProofPlan plan;
    std::vector<MethodResult> results; // plan segments in order, then the beta segment
    CoverCheck cover;
    std::vector<Conclusion> conclusions;
    MethodConfig config;
    std::vector<double> timings; // seconds per result
    bool proved = false;
    std::vector<std::string> failures;
};

inline nlohmann::json to_json(const IntegratorOptions& o)
{
    return {{"order", o.order},
            {"tolerance", to_hex(o.tolerance)},
            {"h_min", to_hex(o.h_min)},
            {"h_max", to_hex(o.h_max)},
            {"backoff", to_hex(o.backoff)},
            {"remainder_slack", to_hex(o.remainder_slack)},
            {"max_steps", o.max_steps},
            {"wrapping", o.wrapping == WrappingMode::qr ? "qr" : "parallelepiped"}};
}

inline nlohmann::json to_json(const MethodConfig& c)
{
    return {{"integrator", to_json(c.integrator)},
            {"t0", interval_json(c.t0)},
            {"tstar_fraction", to_hex(c.tstar_fraction)},
            {"fall_t_max", to_hex(c.fall_t_max)},
            {"bsg_t_max", to_hex(c.bsg_t_max)},
            {"bsg_piece_width", to_hex(c.bsg_piece_width)},
            {"bsg_max_pieces", c.bsg_max_pieces},
            {"infty_s_max", to_hex(c.infty_s_max)},
            {"max_depth", c.max_depth},
            {"max_leaves", c.max_leaves},
            {"max_position_width", to_hex(c.max_position_width)}};
}

namespace cert_detail {

inline MethodResult run_segment(const ProofPlan& plan, std::size_t i, const MethodConfig& cfg)
{
    if (i == plan.segments.size()) {
        return infty_crosses_many(plan.beta, plan.n_states, cfg);
    }
    const PlanSegment& s = plan.segments[i];
    switch (s.method) {
    case Method::fall:
        return fall(s.b, cfg);
    case Method::bound_state_good:
        return bound_state_good(s.b, s.index, cfg);
    case Method::infty_crosses_many:
        break;
    }
    throw DomainError("b-segment cannot use INFTYCROSSESMANY");
}

inline MethodResult failed_result(const ProofPlan& plan, std::size_t i, const std::string& why)
{
    MethodResult r;
    if (i == plan.segments.size()) {
        r.interval = plan.beta;
        r.method = Method::infty_crosses_many;
        r.index = plan.n_states;
    } else {
        r.interval = plan.segments[i].b;
        r.method = plan.segments[i].method;
        r.index = plan.segments[i].index;
    }
    r.status = Status::failed;
    r.reason = why;
    return r;
}

inline std::string segment_name(const MethodResult& r)
{
    std::ostringstream os;
    os << to_string(r.method) << " [" << std::setprecision(17) << r.interval.lo() << ", " << r.interval.hi() << "]";
    return os.str();
}

} // namespace cert_detail

// Runs every segment (concurrently when threads > 1) and derives the
// conclusions. The plan must pass verify_cover.
inline ProofCertificate execute(const ProofPlan& plan, const MethodConfig& cfg = {}, unsigned threads = 1)
{
    ProofCertificate cert;
    cert.n_states = plan.n_states;
    cert.plan = plan;
    cert.config = cfg;
    cert.cover = verify_cover(plan);

    const std::size_t total = plan.segments.size() + 1;
    cert.results.resize(total);
    cert.timings.assign(total, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < total; i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                cert.results[i] = cert_detail::run_segment(plan, i, cfg);
            } catch (const Error& e) {
                cert.results[i] = cert_detail::failed_result(plan, i, e.what());
            }
            cert.timings[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    bool all = true;
    for (const auto& r : cert.results) {
        if (!r.proved()) {
            all = false;
            cert.failures.push_back(cert_detail::segment_name(r) + ": " + r.reason);
        }
    }
    for (int k = 0; k <= plan.n_states; ++k) {
        Conclusion c;
        c.state = k;
        const MethodResult* bsg = nullptr;
        int seen = 0;
        for (const auto& r : cert.results) {
            if (r.method == Method::bound_state_good && r.index == k) {
                bsg = &r;
                ++seen;
            }
        }
        if (bsg == nullptr || seen != 1) {
            c.basis = "no unique BOUNDSTATEGOOD segment for this state";
            all = false;
            cert.failures.push_back("state " + std::to_string(k) + ": " + c.basis);
        } else {
            c.interval = bsg->interval;
            c.unique = all && cert.cover.passed;
        }
        cert.conclusions.push_back(c);
    }
    for (auto& c : cert.conclusions) {
        c.unique = c.unique && all;
        if (c.unique) {
            c.basis = "at most one bound state with " + std::to_string(c.state) +
                      " zero crossings in this interval and none of another index; every other segment holds "
                      "no bound state with at most " +
                      std::to_string(plan.n_states) + " crossings; cover verified";
        } else if (c.basis.empty()) {
            c.basis = "not established";
        }
    }
    cert.proved = all && cert.cover.passed;
    return cert;
}

namespace cert_detail {

inline nlohmann::json state_json(const std::vector<Interval>& s, Method m)
{
    nlohmann::json j;
    if (m == Method::infty_crosses_many) {
        j["w"] = s.size() > 0 ? interval_json(s[0]) : nlohmann::json(nullptr);
        j["vw"] = s.size() > 1 ? interval_json(s[1]) : nlohmann::json(nullptr);
        return j;
    }
    static const char* names[] = {"y", "vy", "delta", "vdelta"};
    for (std::size_t i = 0; i < 4; ++i) {
        j[names[i]] = i < s.size() ? interval_json(s[i]) : nlohmann::json(nullptr);
    }
    return j;
}

inline std::vector<Interval> state_from_json(const nlohmann::json& j, Method m)
{
    std::vector<Interval> s;
    if (m == Method::infty_crosses_many) {
        for (const char* k : {"w", "vw"}) {
            if (j.contains(k) && !j[k].is_null()) {
                s.push_back(interval_from_json(j[k]));
            }
        }
        return s;
    }
    for (const char* k : {"y", "vy", "delta", "vdelta"}) {
        if (j.contains(k) && !j[k].is_null()) {
            s.push_back(interval_from_json(j[k]));
        }
    }
    return s;
}

} // namespace cert_detail

inline nlohmann::json to_json(const ProofCertificate& c)
{
    using nlohmann::json;
    json segments = json::array();
    json timings = json::array();
    for (std::size_t i = 0; i < c.results.size(); ++i) {
        const auto& r = c.results[i];
        json leaves = json::array();
        for (const auto& l : r.witness.leaves) {
            json lj{{"interval", interval_json(l.interval)},
                    {"T", to_hex(l.T)},
                    {"state", cert_detail::state_json(l.state, r.method)},
                    {"crossings", l.crossings},
                    {"exact", l.exact},
                    {"proved", l.proved}};
            lj["energy"] = l.state.empty() ? json(nullptr) : interval_json(l.energy);
            if (!l.note.empty()) {
                lj["note"] = l.note;
            }
            leaves.push_back(std::move(lj));
        }
        json w = cert_detail::state_json(r.witness.state, r.method);
        w["T"] = to_hex(r.witness.T);
        w["crossings"] = r.witness.crossings;
        w["subdivisions"] = r.witness.subdivisions;
        w["leaves"] = std::move(leaves);
        json s{{"lo", to_hex(r.interval.lo())},
               {"hi", to_hex(r.interval.hi())},
               {"method", to_string(r.method)},
               {"status", to_string(r.status)},
               {"witness", std::move(w)}};
        if (r.index >= 0) {
            s["index"] = r.index;
        }
        if (!r.reason.empty()) {
            s["reason"] = r.reason;
        }
        segments.push_back(std::move(s));
        timings.push_back({{"segment", i}, {"seconds", c.timings.size() > i ? c.timings[i] : 0.0}});
    }
    json overlaps = json::array();
    for (const auto& o : c.cover.overlaps) {
        overlaps.push_back({{"left", o.left}, {"overlap", interval_json(o.overlap)}});
    }
    json cover{{"passed", c.cover.passed},
               {"starts_at_sqrt2", c.cover.starts_at_sqrt2},
               {"sqrt2_lower", to_hex(constants::sqrt2().lo())},
               {"overlaps", overlaps},
               {"last_hi", to_hex(c.cover.last_hi)},
               {"inv_last_hi", to_hex(c.cover.inv_last_hi)},
               {"beta_hi", to_hex(c.plan.beta.hi())},
               {"junction", c.cover.junction}};
    json conclusions = json::array();
    for (const auto& k : c.conclusions) {
        conclusions.push_back({{"state", k.state},
                               {"interval", interval_json(k.interval)},
                               {"unique", k.unique},
                               {"basis", k.basis}});
    }
    return {{"version", 1},
            {"n_states", c.n_states},
            {"status", c.proved ? "Proved" : "Failed"},
            {"failures", c.failures},
            {"plan", to_json(c.plan)},
            {"segments", segments},
            {"cover_check", cover},
            {"conclusions", conclusions},
            {"config", to_json(c.config)},
            {"timings", timings}};
}

// Re-validates the logical structure of a serialized certificate without
// integrating anything. Returns the list of problems; empty means valid.
inline std::vector<std::string> recheck_certificate(const nlohmann::json& j)
{
    std::vector<std::string> bad;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) {
            bad.push_back(what);
        }
        return ok;
    };
    try {
        const int n = j.at("n_states").get<int>();
        const auto& segs = j.at("segments");
        need(n >= 0, "negative n_states");
        if (!need(segs.is_array() && !segs.empty(), "no segments")) {
            return bad;
        }
        const auto& beta_seg = segs.back();
        need(beta_seg.at("method") == "INFTYCROSSESMANY", "last segment is not INFTYCROSSESMANY");

        struct Seg {
            Interval iv;
            Method m;
            int index;
            bool proved;
            const nlohmann::json* w;
        };
        std::vector<Seg> bs;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto& s = segs[i];
            const auto m = method_from_string(s.at("method").get<std::string>());
            if (!need(m.has_value(), "unknown method in segment " + std::to_string(i))) {
                continue;
            }
            Seg g{Interval(from_hex(s.at("lo")), from_hex(s.at("hi"))), *m, s.value("index", -1),
                  s.at("status") == "Proved", &s.at("witness")};
            need(g.proved, "segment " + std::to_string(i) + " not proved");
            if (i + 1 < segs.size()) {
                need(g.m != Method::infty_crosses_many, "INFTYCROSSESMANY used on a b-segment");
                bs.push_back(g);
            }
        }

        // Cover of [sqrt 2, oo).
        const Interval beta(from_hex(beta_seg.at("lo")), from_hex(beta_seg.at("hi")));
        need(!bs.empty() && bs.front().iv.lo() <= constants::sqrt2().lo(), "cover does not start at sqrt(2)");
        double reach = bs.empty() ? 0.0 : bs.front().iv.hi();
        for (std::size_t k = 0; k + 1 < bs.size(); ++k) {
            const double lo = std::max(bs[k].iv.lo(), bs[k + 1].iv.lo());
            const double hi = std::min(bs[k].iv.hi(), bs[k + 1].iv.hi());
            need(lo < hi && bs[k + 1].iv.lo() < reach, "segments " + std::to_string(k) + " and " +
                                                           std::to_string(k + 1) + " do not overlap");
            reach = std::max(reach, bs[k + 1].iv.hi());
        }
        need(beta.lo() <= 0.0 && (Interval(1.0) / Interval(reach)).hi() <= beta.hi(), "beta segment misses 1/b_max");
        need(beta.hi() <= detail::one_tenth().lo(), "beta segment exceeds 1/10");

        // Leaves must tile their segment.
        auto tiles = [&](const Interval& iv, const nlohmann::json& leaves, const std::string& name) {
            std::vector<Interval> ls;
            for (const auto& l : leaves) {
                ls.push_back(interval_from_json(l.at("interval")));
            }
            if (!need(!ls.empty(), name + ": no leaves")) {
                return;
            }
            bool ok = ls.front().lo() == iv.lo() && ls.back().hi() == iv.hi();
            for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
                ok = ok && ls[i].hi() == ls[i + 1].lo();
            }
            need(ok, name + ": leaves do not tile the interval");
        };

        // Per-method witness conditions.
        std::vector<int> bsg_index;
        for (std::size_t i = 0; i < bs.size(); ++i) {
            const auto& g = bs[i];
            const std::string name = "segment " + std::to_string(i);
            tiles(g.iv, g.w->at("leaves"), name);
            for (const auto& l : g.w->at("leaves")) {
                const auto st = cert_detail::state_from_json(l.at("state"), g.m);
                const Interval e = l.at("energy").is_null() ? Interval(0.0) : interval_from_json(l.at("energy"));
                const int cr = l.at("crossings").get<int>();
                if (g.m == Method::fall) {
                    need(l.at("exact").get<bool>() && e.hi() < 0.0, name + ": FALL leaf without negative energy");
                    need(st.size() == 4 && st[0].sign() != 0, name + ": FALL leaf with unsigned y");
                } else {
                    const Interval s(g.index % 2 == 0 ? 1.0 : -1.0);
                    const double T = from_hex(l.at("T"));
                    const bool ok = st.size() == 4 && cr == g.index && l.at("exact").get<bool>() &&
                                    (s * st[0]).lo() > 0.0 && (s * st[0]).hi() <= constants::inv_sqrt3().lo() &&
                                    (s * st[1]).hi() < 0.0 && (s * st[2]).hi() < 0.0 && (s * st[3]).hi() < 0.0 &&
                                    check_trap(s * st[0], s * st[1], e, Interval(T)) &&
                                    T == from_hex(g.w->at("T"));
                    need(ok, name + ": BOUNDSTATEGOOD leaf conditions fail");
                }
            }
            if (g.m == Method::bound_state_good) {
                bsg_index.push_back(g.index);
            }
        }
        std::vector<int> expect(static_cast<std::size_t>(std::max(n + 1, 0)));
        for (int k = 0; k <= n; ++k) {
            expect[static_cast<std::size_t>(k)] = k;
        }
        need(bsg_index == expect, "BOUNDSTATEGOOD segments are not exactly states 0..N in order");

        tiles(beta, beta_seg.at("witness").at("leaves"), "beta segment");
        for (const auto& l : beta_seg.at("witness").at("leaves")) {
            need(l.at("crossings").get<int>() >= n + 1, "beta leaf with too few sign changes");
        }
        need(beta_seg.value("index", -1) == n, "beta segment proves the wrong crossing bound");

        const bool valid = bad.empty();
        for (const auto& c : j.at("conclusions")) {
            if (c.at("unique").get<bool>()) {
                need(valid, "conclusion claims uniqueness of state " + std::to_string(c.at("state").get<int>()) +
                                " without a complete proof");
            }
        }
    } catch (const std::exception& e) {
        bad.push_back(std::string("malformed certificate: ") + e.what());
    }
    return bad;
}

inline void emit_certificate(const ProofCertificate& c, const std::string& path)
{
    if (c.results.empty()) {
        throw DomainError("refusing to write an empty certificate");
    }
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot open " + path);
    }
    os << to_json(c).dump(1) << '\n';
    if (!os) {
        throw Error("write failed: " + path);
    }
}

namespace cert_detail {

inline std::string fmt3(const Interval& a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.3f, %.3f]", std::floor(a.lo() * 1000.0) / 1000.0,
                  std::ceil(a.hi() * 1000.0) / 1000.0);
    return buf;
}

} // namespace cert_detail

// Human-readable summary, one row per segment: interval, method, details.
inline std::string emit_table(const ProofCertificate& c)
{
    if (c.results.empty()) {
        throw DomainError("empty certificate");
    }
    std::ostringstream os;
    os << "Interval | Method | Details\n";
    char buf[256];
    for (const auto& r : c.results) {
        const auto& w = r.witness;
        os << (r.method == Method::infty_crosses_many ? "beta in " : "") << cert_detail::fmt3(r.interval) << " "
           << to_string(r.method) << " ";
        if (!r.proved()) {
            os << "FAILED: " << r.reason << '\n';
            continue;
        }
        switch (r.method) {
        case Method::bound_state_good:
            std::snprintf(buf, sizeof buf, "Bound state %d, used T=%.3f", r.index, w.T);
            os << buf;
            if (w.state.size() == 4) {
                os << ", y(T) in " << cert_detail::fmt3(w.state[0]) << ", y'(T) in " << cert_detail::fmt3(w.state[1])
                   << ", delta in " << cert_detail::fmt3(w.state[2]) << ", delta' in "
                   << cert_detail::fmt3(w.state[3]);
            }
            break;
        case Method::fall:
            std::snprintf(buf, sizeof buf, "%zu subintervals, energy negative by T=%.3f, crossings %s",
                          w.subdivisions, w.T, w.crossings >= 0 ? std::to_string(w.crossings).c_str() : "vary");
            os << buf;
            break;
        case Method::infty_crosses_many:
            std::snprintf(buf, sizeof buf, "%zu subintervals, at least %d crossings by s=%.1f", w.subdivisions,
                          r.index + 1, w.T);
            os << buf;
            break;
        }
        os << '\n';
    }
    return os.str();
}

// CSV (b, limit, band) for the limiting position of y_b as a function of b.
// The limit is the float-oracle trapping side (+1 / -1, 0 when not trapped
// by the horizon); band marks b inside a BOUNDSTATEGOOD interval.
inline void emit_plot_data(const ProofCertificate& c, const std::string& path, std::size_t samples = 2000)
{
    if (c.results.empty() || c.plan.segments.empty()) {
        throw DomainError("empty certificate");
    }
    const double lo = constants::sqrt2().hi();
    const double hi = c.cover.last_hi > lo ? c.cover.last_hi : c.plan.segments.back().b.hi();
    std::ostringstream os;
    os << "b,limit,band\n" << std::setprecision(10);
    FloatSolveOptions fo;
    fo.keep_samples = false;
    fo.stop_when_trapped = true;
    for (std::size_t i = 0; i < samples; ++i) {
        const double b = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const auto tr = float_solve(b, 60.0, std::min(1e-3, 0.02 / b), fo);
        const int limit = tr.trapped ? (tr.last.y > 0 ? 1 : -1) : 0;
        int band = 0;
        for (const auto& s : c.plan.segments) {
            if (s.method == Method::bound_state_good && s.b.contains(b)) {
                band = 1;
            }
        }
        os << b << ',' << limit << ',' << band << '\n';
    }
    std::ofstream f(path);
    if (!f) {
        throw Error("cannot open " + path);
    }
    f << os.str();
}

} // namespace rprove
