#include <fencemill/scenario.hpp>

#include <gtest/gtest.h>

using namespace fencemill;

namespace
{
    ScenarioConfig small (BehaviorMode mode, int agents = 2, double duration = 120.0)
    {
        ScenarioConfig c;
        c.n_agents = agents;
        c.duration = duration;
        c.behavior.mode = mode;
        c.seed = 17;
        return c;
    }

    bool time_ordered (const AgentLog &a)
    {
        for (std::size_t i = 1; i < a.trajectory.samples.size (); ++i)
            if (!(a.trajectory.samples[i].t > a.trajectory.samples[i - 1].t))
                return false;
        for (std::size_t i = 1; i < a.ranges.size (); ++i)
            if (a.ranges[i].t_recv < a.ranges[i - 1].t_recv)
                return false;
        for (std::size_t i = 1; i < a.commands.size (); ++i)
            if (a.commands[i].t < a.commands[i - 1].t)
                return false;
        return true;
    }
}

TEST (Scenario, ValidationHappensBeforeStepping)
{
    ScenarioConfig c;
    c.n_agents = 0;
    EXPECT_THROW ((void) run (c), ConfigError);
    c = {};
    c.duration = -1.0;
    EXPECT_THROW ((void) run (c), ConfigError);
    c = {};
    c.log_interval = 0.07;
    EXPECT_THROW ((void) run (c), ConfigError);
    c = {};
    c.initial.placement = Placement::explicit_poses;
    c.initial.poses = {{0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
    EXPECT_THROW ((void) run (c), ConfigError);
    c.initial.poses = {{0.0, std::nan (""), 0.0}};
    EXPECT_THROW ((void) run (c), ConfigError);
}

TEST (Scenario, ZeroThrustAgentStaysPut)
{
    ScenarioConfig c = small (BehaviorMode::heb_fence, 1, 60.0);
    c.behavior.fx = 0.0;
    c.initial.placement = Placement::explicit_poses;
    c.initial.poses = {{3.0, -4.0, 20.0}};
    const RunLog log = run (c);
    for (const TrajectorySample &s : log.agents[0].trajectory.samples)
    {
        ASSERT_EQ (s.x, 3.0);
        ASSERT_EQ (s.y, -4.0);
    }
    EXPECT_TRUE (log.agents[0].commands.empty ());
}

TEST (Scenario, LogsAreTimeOrderedAndSized)
{
    for (BehaviorMode m : {BehaviorMode::rvb_fence, BehaviorMode::rvb_mill, BehaviorMode::heb_fence, BehaviorMode::heb_mill})
    {
        ScenarioConfig c = small (m, 3);
        c.behavior.rate_gain_deg_per_s = 1.0;
        const RunLog log = run (c);
        ASSERT_EQ (log.agents.size (), 3u);
        for (const AgentLog &a : log.agents)
        {
            EXPECT_TRUE (time_ordered (a));
            EXPECT_EQ (a.trajectory.samples.size (), 1201u);
            // Agent i ranges every 3 s: 40 slots per agent, minus the first
            // pending slot that has not been delivered by t = 120.
            EXPECT_GE (a.ranges.size (), 39u);
            EXPECT_LE (a.ranges.size (), 40u);
            for (const RangeSample &r : a.ranges)
                ASSERT_GE (r.t_recv, r.t_meas);
        }
    }
}

TEST (Scenario, RangesCarryOneSlotLatency)
{
    const RunLog log = run (small (BehaviorMode::heb_fence, 1, 20.0));
    for (const RangeSample &r : log.agents[0].ranges)
        ASSERT_DOUBLE_EQ (r.t_recv - r.t_meas, 1.0);
    ScenarioConfig c = small (BehaviorMode::heb_fence, 1, 20.0);
    c.channel.latency_slots = 0;
    const RunLog instant = run (c);
    for (const RangeSample &r : instant.agents[0].ranges)
        ASSERT_EQ (r.t_recv, r.t_meas);
}

TEST (Scenario, DeliveredRangeMatchesTruthAtMeasurementTime)
{
    const RunLog log = run (small (BehaviorMode::heb_fence, 1, 60.0));
    const auto &traj = log.agents[0].trajectory.samples;
    for (const RangeSample &r : log.agents[0].ranges)
    {
        const auto idx = static_cast<std::size_t> (std::llround (r.t_meas / 0.1));
        ASSERT_NEAR (traj[idx].t, r.t_meas, 1e-9);
        ASSERT_EQ (r.r, traj[idx].r);
    }
}

TEST (Scenario, BitIdenticalReruns)
{
    for (BehaviorMode m : {BehaviorMode::rvb_mill, BehaviorMode::heb_mill})
    {
        ScenarioConfig c = small (m, 3);
        c.channel.loss_prob = 0.2;
        c.channel.range_noise_std = 0.05;
        const RunLog a = run (c), b = run (c);
        ASSERT_EQ (a.agents, b.agents);
    }
}

TEST (Scenario, SeedChangesTheRun)
{
    ScenarioConfig c = small (BehaviorMode::heb_fence, 1);
    const RunLog a = run (c);
    c.seed = 18;
    EXPECT_NE (a.agents, run (c).agents);
}

TEST (Scenario, RandomPlacementRespectsSpawnFraction)
{
    ScenarioConfig c = small (BehaviorMode::heb_mill, 50);
    c.behavior.shape = ShapeSpec::isotoxal_star (30.0, 10.0);
    c.initial.spawn_fraction = 0.5;
    for (const Pose &p : initial_poses (c))
    {
        const double th = std::atan2 (p.y, p.x);
        ASSERT_LE (std::hypot (p.x, p.y), 0.5 * c.shape ().radius_at (th));
        ASSERT_GT (p.heading_deg, -180.0);
        ASSERT_LE (p.heading_deg, 180.0);
    }
}

TEST (Scenario, DopplerBroadcastFeedsEveryAgent)
{
    ScenarioConfig c = small (BehaviorMode::heb_fence, 2, 60.0);
    c.channel.timing_mode = TimingMode::protocol;
    c.channel.rate_source = RateSource::doppler;
    const RunLog log = run (c);
    // One broadcast per 3-slot turn reaches both agents: 20 in 60 s.
    for (const AgentLog &a : log.agents)
    {
        EXPECT_EQ (a.rates.size (), 20u);
        for (const RangeSample &r : a.ranges)
            ASSERT_TRUE (r.u_r.has_value ());
    }
}

TEST (Scenario, RemovingAnAgentOnlyChangesScheduling)
{
    // Agent 0 gets its first range at t = 1 in both runs; until then the
    // second agent can only matter through hidden coupling.
    ScenarioConfig two = small (BehaviorMode::heb_fence, 2, 10.0);
    two.initial.placement = Placement::explicit_poses;
    two.initial.poses = {{1.0, 2.0, 30.0}, {-5.0, 4.0, -120.0}};
    ScenarioConfig one = two;
    one.n_agents = 1;
    one.initial.poses = {{1.0, 2.0, 30.0}};
    const RunLog a = run (two), b = run (one);
    for (std::size_t i = 0; i <= 10; ++i)
        ASSERT_EQ (a.agents[0].trajectory.samples[i], b.agents[0].trajectory.samples[i]);
    ASSERT_FALSE (a.agents[0].ranges.empty ());
    EXPECT_EQ (a.agents[0].ranges[0].r, b.agents[0].ranges[0].r);
}

TEST (Scenario, ChannelDeliveryPrecedesTurnRateTick)
{
    // At t = 1 s both a range delivery and a turn-rate tick fall due; the
    // range is handled first so both commands carry t = 1 in that order.
    ScenarioConfig c = small (BehaviorMode::rvb_mill, 1, 5.0);
    c.behavior.rate_gain_deg_per_s = 5.0;
    c.behavior.shape = ShapeSpec::circle (0.5);
    c.initial.placement = Placement::explicit_poses;
    c.initial.poses = {{1.0, 0.0, 0.0}};
    const RunLog log = run (c);
    const auto &cmds = log.agents[0].commands;
    bool seen = false;
    for (std::size_t i = 0; i + 1 < cmds.size (); ++i)
        if (cmds[i].t == cmds[i + 1].t && cmds[i].reason == CommandReason::correct)
        {
            EXPECT_EQ (cmds[i + 1].reason, CommandReason::rate_tick);
            seen = true;
        }
    EXPECT_TRUE (seen);
}
