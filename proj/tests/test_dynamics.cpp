#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "rprove/dynamics.hpp"
#include "rprove/integrator.hpp"

using rprove::Interval;
using rprove::IVec;
using Rep4 = rprove::EnclosureRepresentation<4, 1>;

namespace {

Rep4 seed_main(const Interval& b)
{
    return Rep4::from(rprove::initial_set_main(b, rprove::start_time_main(b, 0.101, 0.1)));
}

rprove::Trajectory<4, 1> careful_run(const Interval& b, double T, double cap_scale = 1.0)
{
    rprove::MainIntegrator integ;
    rprove::StopCondition<4, 1> stop;
    stop.t_end = T;
    stop.step_cap = [cap_scale](const IVec<4>& x) { return cap_scale * rprove::careful_step_cap(x); };
    return integ.integrate(seed_main(b), stop);
}

rprove::StepRecord<4> record(double t0, double t1, const IVec<4>& ap, const IVec<4>& end)
{
    return {t0, t1, ap, end};
}

IVec<4> yv(Interval y, Interval v) { return {y, v, Interval(1.0), Interval(0.0)}; }

} // namespace

TEST(Energy, PointValues)
{
    EXPECT_TRUE(rprove::energy(Interval(1.0), Interval(0.0)).contains(-0.25));
    EXPECT_TRUE(rprove::energy(Interval(0.0), Interval(0.0)).contains(0.0));
    const long double b = 4.3373L;
    const Interval e = rprove::energy(Interval(4.3373), Interval(0.0));
    const long double ref = b * b * b * b / 4 - b * b / 2;
    EXPECT_LE((long double)e.lo(), ref);
    EXPECT_GE((long double)e.hi(), ref);
    EXPECT_NEAR(e.mid(), 79.05, 0.05);
}

TEST(Energy, ScaledEnergyAtRest)
{
    // w^4/4 - beta^2 w^2/2 at w = 1
    EXPECT_TRUE(rprove::scaled_energy(Interval(1.0), Interval(0.0), Interval(0.1)).contains(0.25 - 0.005));
}

TEST(Energy, LohnerFormIsInsideTheBoxValue)
{
    const Rep4 rep = seed_main(Interval(4.2, 4.3));
    const Interval e = rprove::energy(rep);
    EXPECT_TRUE(rprove::energy(rep.bounds[0], rep.bounds[1]).contains(e));
}

TEST(MaxSpeed, Examples)
{
    EXPECT_LE(rprove::max_speed(Interval(-0.25)), 1e-7);
    const double s = rprove::max_speed(Interval(0.0));
    EXPECT_GE(s, std::sqrt(0.5));
    EXPECT_NEAR(s, std::sqrt(0.5), 1e-15);
    const double big = rprove::max_speed(rprove::energy(Interval(4.3373), Interval(0.0)));
    EXPECT_NEAR(big, 12.6, 0.05);
    EXPECT_EQ(rprove::max_speed(Interval(-1.0, -0.5)), 0.0);
}

TEST(DoubleCross, Examples)
{
    EXPECT_TRUE(rprove::certify_no_double_cross(0.1, 12.6));
    EXPECT_FALSE(rprove::certify_no_double_cross(1.0, 12.6));
    EXPECT_TRUE(rprove::certify_no_double_cross(1e9, 0.0));
    EXPECT_TRUE(rprove::certify_no_double_cross(0.5, 4.0));
}

TEST(DoubleCross, CareFulCapSatisfiesTheCriterion)
{
    const IVec<4> x = yv(Interval(4.3373), Interval(0.0));
    const double cap = rprove::careful_step_cap(x);
    EXPECT_TRUE(rprove::certify_no_double_cross(cap, rprove::main_speed_bound(x)));
    EXPECT_GT(cap, 0.15);
}

TEST(CountCrossings, FirstExcitedSeedsCrossOnce)
{
    const auto traj = careful_run(Interval(14.085, 14.115), 2.855);
    ASSERT_EQ(traj.reason, rprove::StopReason::reached_time);
    const auto c = rprove::count_crossings(traj);
    EXPECT_EQ(c.count, 1);
    EXPECT_TRUE(c.exact);
    EXPECT_EQ(c.last_sign, -1);
}

TEST(CountCrossings, SmallSeedNeverCrosses)
{
    const auto traj = careful_run(Interval(1.5), 20.0);
    ASSERT_EQ(traj.reason, rprove::StopReason::reached_time);
    const auto c = rprove::count_crossings(traj);
    EXPECT_EQ(c.count, 0);
    EXPECT_TRUE(c.exact);
    EXPECT_EQ(c.last_sign, 1);
}

TEST(CountCrossings, OpenRunAtTheEndIsAmbiguous)
{
    rprove::Trajectory<4, 1> traj;
    traj.steps.push_back(record(1.0, 1.0, yv(Interval(1.0, 2.0), Interval(-1.0)), yv(Interval(1.0, 2.0), Interval(-1.0))));
    traj.steps.push_back(record(1.0, 1.5, yv(Interval(-0.2, 2.0), Interval(-2.0, -0.5)),
                                yv(Interval(-0.1, 0.1), Interval(-1.5, -0.5))));
    EXPECT_THROW(rprove::count_crossings(traj), rprove::AmbiguousSign);
}

TEST(CountCrossings, SeedContainingZeroIsAmbiguous)
{
    rprove::CrossingCounter<4> counter(0, 1, rprove::main_speed_bound);
    EXPECT_THROW(counter.start(1.0, yv(Interval(-0.1, 0.1), Interval(0.0))), rprove::AmbiguousSign);
}

TEST(CountCrossings, SignedVelocityCertifiesAcrossStraddlingSteps)
{
    rprove::CrossingCounter<4> counter(0, 1);
    counter.start(1.0, yv(Interval(0.5, 0.6), Interval(-1.0)));
    counter.consume(record(1.0, 1.2, yv(Interval(-0.1, 0.6), Interval(-1.2, -0.8)), yv(Interval(-0.05, 0.05), Interval(-1.1, -0.9))));
    EXPECT_TRUE(counter.run_open());
    counter.consume(record(1.2, 1.4, yv(Interval(-0.3, 0.05), Interval(-1.2, -0.8)), yv(Interval(-0.3, -0.2), Interval(-1.1, -0.9))));
    EXPECT_FALSE(counter.run_open());
    EXPECT_EQ(counter.count(), 1);
    EXPECT_TRUE(counter.exact());
}

TEST(CountCrossings, UncertifiedRunMakesCountInexact)
{
    rprove::CrossingCounter<4> counter(0, 1);
    counter.start(1.0, yv(Interval(0.5, 0.6), Interval(-1.0)));
    counter.consume(record(1.0, 5.0, yv(Interval(-3.0, 3.0), Interval(-5.0, 5.0)), yv(Interval(0.4, 0.5), Interval(1.0))));
    EXPECT_EQ(counter.count(), 0);
    EXPECT_FALSE(counter.exact());
}

TEST(DynamicsProperty, CrossingCountMatchesReference)
{
    // Seeds away from the first bound states, where the count is stable.
    const double bound_states[] = {4.3373, 14.1, 29.13, 49.36};
    std::mt19937_64 g(31);
    std::uniform_real_distribution<double> ub(1.5, 50.0);
    std::uniform_real_distribution<double> uT(2.0, 6.0);
    int checked = 0;
    while (checked < 100) {
        const double b = ub(g);
        bool near = false;
        for (double bk : bound_states) {
            near = near || std::fabs(b - bk) < 0.3;
        }
        if (near) {
            continue;
        }
        double T = uT(g);
        if (std::fabs(oracle::main_trajectory(b, {(long double)T})[0][0]) < 0.05L) {
            continue;
        }
        const auto traj = careful_run(Interval(b), T);
        ASSERT_EQ(traj.reason, rprove::StopReason::reached_time) << "b=" << b;
        const auto c = rprove::count_crossings(traj);
        ASSERT_TRUE(c.exact) << "b=" << b << " T=" << T;
        ASSERT_EQ(c.count, oracle::crossings(b, T, 0.0005L)) << "b=" << b << " T=" << T;
        ++checked;
    }
}

TEST(DynamicsProperty, EnergyUpperBoundNonIncreasingUpToSlack)
{
    for (double b : {2.0, 8.0, 20.0}) {
        const auto traj = careful_run(Interval(b - 1e-4, b + 1e-4), 6.0);
        for (std::size_t k = 1; k < traj.steps.size(); ++k) {
            const Interval e0 = rprove::energy(traj.steps[k - 1].end[0], traj.steps[k - 1].end[1]);
            const Interval e1 = rprove::energy(traj.steps[k].end[0], traj.steps[k].end[1]);
            ASSERT_LE(e1.lo(), e0.hi()) << "b=" << b << " step " << k;
        }
    }
}

TEST(DynamicsProperty, ExactCountSurvivesHalvedSteps)
{
    std::mt19937_64 g(32);
    std::uniform_real_distribution<double> ub(1.5, 35.0);
    for (int i = 0; i < 15; ++i) {
        const double b = ub(g);
        const auto a = careful_run(Interval(b), 4.0);
        const auto c = careful_run(Interval(b), 4.0, 0.5);
        try {
            const auto ca = rprove::count_crossings(a);
            if (!ca.exact) {
                continue;
            }
            const auto cc = rprove::count_crossings(c);
            ASSERT_EQ(ca.count, cc.count) << "b=" << b;
            ASSERT_EQ(ca.last_sign, cc.last_sign) << "b=" << b;
        } catch (const rprove::AmbiguousSign&) {
            // a crossing right at T; nothing to compare
        }
    }
}
