#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "rprove/methods.hpp"

using rprove::Interval;
using rprove::Method;
using rprove::MethodConfig;
using rprove::Status;

namespace {

void expect_tiling(const Interval& parent, std::vector<rprove::LeafWitness> leaves)
{
    ASSERT_FALSE(leaves.empty());
    std::sort(leaves.begin(), leaves.end(),
              [](const auto& a, const auto& b) { return a.interval.lo() < b.interval.lo(); });
    EXPECT_EQ(leaves.front().interval.lo(), parent.lo());
    EXPECT_EQ(leaves.back().interval.hi(), parent.hi());
    for (std::size_t i = 1; i < leaves.size(); ++i) {
        EXPECT_EQ(leaves[i - 1].interval.hi(), leaves[i].interval.lo());
    }
}

} // namespace

TEST(CheckTrap, AcceptsASmallPositiveState)
{
    const Interval y(0.2, 0.21);
    const Interval v(-0.3, -0.29);
    const Interval e = rprove::energy(y, v);
    EXPECT_TRUE(rprove::check_trap(y, v, e, Interval(2.0)));
}

TEST(CheckTrap, RejectsEachViolatedCondition)
{
    const Interval y(0.2, 0.21);
    const Interval v(-0.3, -0.29);
    const Interval e = rprove::energy(y, v);
    const Interval T(2.0);
    EXPECT_FALSE(rprove::check_trap(y, v, Interval(0.25, 0.26), T));
    EXPECT_FALSE(rprove::check_trap(Interval(0.6, 0.7), v, e, T));
    EXPECT_FALSE(rprove::check_trap(Interval(0.4, 0.5), v, e, T));
    EXPECT_FALSE(rprove::check_trap(y, Interval(-0.1, 0.0), e, T));
    EXPECT_FALSE(rprove::check_trap(Interval(-0.01, 0.2), v, e, T));
    EXPECT_FALSE(rprove::check_trap(y, v, Interval(-0.01, 0.02), T));
    // E (T - 2 ln E + 3/2) crosses 3/8 near T = 6.1 for this state.
    EXPECT_FALSE(rprove::check_trap(y, v, e, Interval(7.0)));
}

TEST(CheckTrap, CoarseGroundStateBoxAtT1921FailsTheProductBound)
{
    // The box [0.127, 0.277] x [-0.342, -0.283] allows E up to about 0.05,
    // where E (T - 2 ln E + 3/2) is about 0.47 > 3/8.
    const Interval y(0.127, 0.277);
    const Interval v(-0.342, -0.283);
    const Interval e = rprove::energy(y, v);
    EXPECT_GT(e.lo(), 0.0);
    EXPECT_LT(e.hi(), 0.25);
    EXPECT_FALSE(rprove::check_trap(y, v, e, Interval(1.921)));
}

TEST(CheckTrap, NamesAndParsing)
{
    EXPECT_STREQ(rprove::to_string(Method::fall), "FALL");
    EXPECT_STREQ(rprove::to_string(Method::bound_state_good), "BOUNDSTATEGOOD");
    EXPECT_STREQ(rprove::to_string(Method::infty_crosses_many), "INFTYCROSSESMANY");
    EXPECT_EQ(rprove::method_from_string("FALL"), Method::fall);
    EXPECT_FALSE(rprove::method_from_string("fall").has_value());
    EXPECT_STREQ(rprove::to_string(Status::proved), "Proved");
}

TEST(Fall, BelowTheGroundState)
{
    const auto r = rprove::fall(Interval(rprove::constants::sqrt2().lo(), 4.26));
    EXPECT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.method, Method::fall);
    EXPECT_EQ(r.witness.crossings, 0);
    for (const auto& l : r.witness.leaves) {
        EXPECT_TRUE(l.exact);
        EXPECT_LT(l.energy.hi(), 0.0);
        EXPECT_GT(l.state[0].lo(), 0.0);
    }
}

TEST(Fall, BetweenGroundAndFirstExcitedState)
{
    const auto r = rprove::fall(Interval(4.42, 14.10));
    EXPECT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.witness.crossings, 1);
    for (const auto& l : r.witness.leaves) {
        EXPECT_LT(l.state[0].hi(), 0.0);
    }
}

TEST(Fall, IntervalAroundTheGroundStateCannotFall)
{
    MethodConfig cfg;
    cfg.max_depth = 4;
    const auto r = rprove::fall(Interval(4.25, 4.43), cfg);
    EXPECT_FALSE(r.proved());
    EXPECT_EQ(r.reason.rfind("DepthExceeded", 0), 0u) << r.reason;
}

TEST(Fall, LeavesTileTheInterval)
{
    const Interval b(1.5, 4.2);
    const auto r = rprove::fall(b);
    ASSERT_TRUE(r.proved());
    EXPECT_GT(r.witness.leaves.size(), 1u);
    expect_tiling(b, r.witness.leaves);
}

TEST(Fall, RejectsSeedsBelowSqrt2)
{
    EXPECT_THROW(rprove::fall(Interval(1.0, 2.0)), rprove::DomainError);
}

TEST(BoundStateGood, GroundState)
{
    const Interval b(4.266, 4.433);
    const auto r = rprove::bound_state_good(b, 0);
    ASSERT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.index, 0);
    EXPECT_GT(r.witness.T, 1.5);
    EXPECT_LT(r.witness.T, 3.0);
    expect_tiling(b, r.witness.leaves);
    for (const auto& l : r.witness.leaves) {
        EXPECT_EQ(l.T, r.witness.T);
        EXPECT_EQ(l.crossings, 0);
        EXPECT_TRUE(l.exact);
        EXPECT_GT(l.state[0].lo(), 0.0);
        EXPECT_LT(l.state[1].hi(), 0.0);
        EXPECT_LT(l.state[2].hi(), 0.0);
        EXPECT_LT(l.state[3].hi(), 0.0);
        EXPECT_TRUE(rprove::check_trap(l.state[0], l.state[1], l.energy, Interval(l.T)));
    }
}

TEST(BoundStateGood, FirstExcitedStateUsesReflectedSigns)
{
    const auto r = rprove::bound_state_good(Interval(14.085, 14.115), 1);
    ASSERT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.witness.crossings, 1);
    for (const auto& l : r.witness.leaves) {
        EXPECT_LT(l.state[0].hi(), 0.0);
        EXPECT_GT(l.state[1].lo(), 0.0);
        EXPECT_GT(l.state[2].lo(), 0.0);
        EXPECT_GT(l.state[3].lo(), 0.0);
        EXPECT_TRUE(rprove::check_trap(-l.state[0], -l.state[1], l.energy, Interval(l.T)));
    }
}

TEST(BoundStateGood, SecondExcitedState)
{
    const auto r = rprove::bound_state_good(Interval(29.090, 29.174), 2);
    ASSERT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.witness.crossings, 2);
    EXPECT_GT(r.witness.T, 3.0);
    EXPECT_LT(r.witness.T, 8.0);
}

TEST(BoundStateGood, WrongIndexFails)
{
    const auto r = rprove::bound_state_good(Interval(4.266, 4.433), 1);
    EXPECT_FALSE(r.proved());
    EXPECT_FALSE(r.reason.empty());
}

TEST(BoundStateGood, IsDeterministic)
{
    const auto a = rprove::bound_state_good(Interval(14.085, 14.115), 1);
    const auto b = rprove::bound_state_good(Interval(14.085, 14.115), 1);
    ASSERT_EQ(a.witness.leaves.size(), b.witness.leaves.size());
    EXPECT_EQ(a.witness.T, b.witness.T);
    for (std::size_t i = 0; i < a.witness.leaves.size(); ++i) {
        const auto& la = a.witness.leaves[i];
        const auto& lb = b.witness.leaves[i];
        EXPECT_EQ(la.interval, lb.interval);
        for (std::size_t k = 0; k < la.state.size(); ++k) {
            EXPECT_EQ(la.state[k], lb.state[k]);
        }
    }
}

TEST(InftyCrossesMany, SmallBetaRange)
{
    const Interval beta(0.0, 0.019);
    const auto r = rprove::infty_crosses_many(beta, 3);
    ASSERT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.method, Method::infty_crosses_many);
    expect_tiling(beta, r.witness.leaves);
    for (const auto& l : r.witness.leaves) {
        EXPECT_GE(l.crossings, 4);
    }
}

TEST(InftyCrossesMany, BetaZeroOscillates)
{
    const auto r = rprove::infty_crosses_many(Interval(0.0), 3);
    ASSERT_TRUE(r.proved()) << r.reason;
    EXPECT_EQ(r.witness.leaves.size(), 1u);
    EXPECT_GE(r.witness.leaves.front().crossings, 4);
}

TEST(InftyCrossesMany, RejectsLargeBeta)
{
    EXPECT_THROW(rprove::infty_crosses_many(Interval(0.12, 0.13), 3), rprove::BetaRangeError);
    EXPECT_THROW(rprove::infty_crosses_many(Interval(-0.01, 0.01), 3), rprove::BetaRangeError);
}
