#pragma once
/**
 * @file   scenario.hpp
 * @brief  Fixed-step multi-agent simulation binding dynamics, channel and behaviors.
 *
 * The clock is an integer step counter; every event time is a step index
 * times dt. Within one step the order is fixed:
 *
 *  1. channel: deliver the message of the slot that just ended, then open
 *     the next slot (snapshotting ground truth if it carries a range);
 *  2. turn-rate timer for the agents that use it;
 *  3. compass sample to each agent's own heading history;
 *  4. trajectory logging;
 *  5. one dynamics step per agent, in agent order.
 *
 * A run with a given configuration and seed is therefore bit-reproducible.
 */

#include "angles.hpp"
#include "behaviors.hpp"
#include "channel.hpp"
#include "dynamics.hpp"
#include "metrics.hpp"
#include "shapes.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fencemill
{
    inline constexpr const char *kLogFormatVersion = "fencemill-runlog/1";

    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct Pose
    {
        double x = 0.0;
        double y = 0.0;
        double heading_deg = 0.0;

        friend bool operator== (const Pose &, const Pose &) = default;
    };

    enum class Placement
    {
        random_inside,
        explicit_poses
    };

    struct InitialPoses
    {
        Placement placement = Placement::random_inside;
        double spawn_fraction = 1.0; ///< random poses lie inside this scaled copy of the shape
        std::vector<Pose> poses;
    };

    /// Per-agent behavior parameters that differ from the shared ones.
    struct AgentOverride
    {
        std::optional<BehaviorMode> mode;
        std::optional<Rotation> direction;
        std::optional<double> gain_deg_per_m;
        std::optional<double> rate_gain_deg_per_s;
        std::optional<double> rotation_step_deg;
        std::optional<int> window_len;
        std::optional<double> fx;
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        int n_agents = 1;
        double duration = 1000.0;    ///< s
        double log_interval = 0.1;   ///< s between trajectory samples
        std::uint64_t seed = 1;
        BehaviorConfig behavior;     ///< shared by all agents; owns the shape
        std::vector<AgentOverride> agent_overrides;
        DynamicsParams dynamics;
        ChannelConfig channel;
        Vec2 flow;                   ///< constant ambient current, m/s
        InitialPoses initial;
        double metrics_skip = 0.0;   ///< s of transient excluded from metrics

        [[nodiscard]] const ShapeSpec &shape () const noexcept { return behavior.shape; }

        [[nodiscard]] BehaviorConfig behavior_for (int agent) const
        {
            BehaviorConfig b = behavior;
            if (agent >= 0 && static_cast<std::size_t> (agent) < agent_overrides.size ())
            {
                const AgentOverride &o = agent_overrides[static_cast<std::size_t> (agent)];
                if (o.mode) b.mode = *o.mode;
                if (o.direction) b.direction = *o.direction;
                if (o.gain_deg_per_m) b.gain_deg_per_m = *o.gain_deg_per_m;
                if (o.rate_gain_deg_per_s) b.rate_gain_deg_per_s = *o.rate_gain_deg_per_s;
                if (o.rotation_step_deg) b.rotation_step_deg = *o.rotation_step_deg;
                if (o.window_len) b.window_len = *o.window_len;
                if (o.fx) b.fx = *o.fx;
            }
            return b;
        }

        void validate () const
        {
            if (n_agents < 1)
                throw ConfigError ("n_agents must be at least 1");
            if (!(duration > 0.0) || !std::isfinite (duration))
                throw ConfigError ("duration must be positive");
            if (!(log_interval > 0.0))
                throw ConfigError ("log_interval must be positive");
            if (!std::isfinite (flow.x) || !std::isfinite (flow.y))
                throw ConfigError ("flow must be finite");
            if (metrics_skip < 0.0)
                throw ConfigError ("metrics_skip must be non-negative");
            try
            {
                dynamics.validate ();
                channel.validate ();
                for (int i = 0; i < n_agents; ++i)
                    behavior_for (i).validate ();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError (e.what ());
            }
            if (initial.placement == Placement::explicit_poses)
            {
                if (initial.poses.size () != static_cast<std::size_t> (n_agents))
                    throw ConfigError ("initial_poses lists " + std::to_string (initial.poses.size ()) + " poses for " + std::to_string (n_agents) + " agents");
                for (const Pose &p : initial.poses)
                    if (!std::isfinite (p.x) || !std::isfinite (p.y) || !std::isfinite (p.heading_deg))
                        throw ConfigError ("initial pose is not finite");
            }
            else if (!(initial.spawn_fraction > 0.0 && initial.spawn_fraction <= 1.0))
                throw ConfigError ("spawn_fraction must lie in (0, 1]");
            if (agent_overrides.size () > static_cast<std::size_t> (n_agents))
                throw ConfigError ("more agent overrides than agents");
            (void) steps_per (channel.slot_time, "channel.slot_time");
            (void) steps_per (log_interval, "log_interval");
            for (int i = 0; i < n_agents; ++i)
                if (behavior_for (i).mode == BehaviorMode::rvb_mill)
                    (void) steps_per (behavior_for (i).heading_update_dt, "behavior.heading_update_dt");
        }

        /// Whole number of dynamics steps in `interval`; throws otherwise.
        [[nodiscard]] std::int64_t steps_per (double interval, const char *what) const
        {
            const double ratio = interval / dynamics.dt;
            const double whole = std::round (ratio);
            if (whole < 1.0 || std::abs (ratio - whole) > 1e-6 * whole)
                throw ConfigError (std::string (what) + " must be a whole multiple of dt");
            return static_cast<std::int64_t> (whole);
        }

        [[nodiscard]] std::int64_t total_steps () const { return static_cast<std::int64_t> (std::llround (duration / dynamics.dt)); }
    };

    struct CommandEvent
    {
        double t = 0.0;
        double psi_cmd = 0.0;
        double fx = 0.0;
        CommandReason reason = CommandReason::hold;

        friend bool operator== (const CommandEvent &, const CommandEvent &) = default;
    };

    struct AgentLog
    {
        Trajectory trajectory;
        std::vector<RangeSample> ranges;
        std::vector<RateSample> rates;
        std::vector<CommandEvent> commands;

        friend bool operator== (const AgentLog &, const AgentLog &) = default;
    };

    struct RunLog
    {
        std::string version = kLogFormatVersion;
        ScenarioConfig config;
        std::vector<AgentLog> agents;
    };

    namespace detail
    {
        [[nodiscard]] constexpr std::uint64_t splitmix64 (std::uint64_t x) noexcept
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }
    } // namespace detail

    [[nodiscard]] inline std::uint64_t channel_seed (std::uint64_t seed) noexcept { return detail::splitmix64 (seed ^ 0x636861ULL); }
    [[nodiscard]] inline std::uint64_t placement_seed (std::uint64_t seed) noexcept { return detail::splitmix64 (seed ^ 0x706f7365ULL); }

    [[nodiscard]] inline std::vector<Pose> initial_poses (const ScenarioConfig &cfg)
    {
        if (cfg.initial.placement == Placement::explicit_poses)
            return cfg.initial.poses;

        std::mt19937_64 rng (placement_seed (cfg.seed));
        std::uniform_real_distribution<double> unit (-1.0, 1.0);
        const ShapeSpec &shape = cfg.shape ();
        double reach = shape.radius ();
        for (const Vec2 &v : shape.vertices ())
            reach = std::max (reach, norm (v));

        std::vector<Pose> poses;
        for (int i = 0; i < cfg.n_agents; ++i)
        {
            Pose p;
            for (;;)
            {
                p.x = unit (rng) * reach;
                p.y = unit (rng) * reach;
                const double r = std::hypot (p.x, p.y);
                if (r <= cfg.initial.spawn_fraction * shape.radius_at (std::atan2 (p.y, p.x)))
                    break;
            }
            p.heading_deg = rad_to_deg (normalize_angle (unit (rng) * kPi));
            poses.push_back (p);
        }
        return poses;
    }

    [[nodiscard]] inline RunLog run (const ScenarioConfig &cfg)
    {
        cfg.validate ();

        const int n = cfg.n_agents;
        const double dt = cfg.dynamics.dt;
        const std::int64_t steps = cfg.total_steps ();
        const std::int64_t slot_steps = cfg.steps_per (cfg.channel.slot_time, "channel.slot_time");
        const std::int64_t log_steps = cfg.steps_per (cfg.log_interval, "log_interval");

        std::vector<BehaviorConfig> behaviors;
        std::vector<std::int64_t> tick_steps;
        for (int i = 0; i < n; ++i)
        {
            behaviors.push_back (cfg.behavior_for (i));
            tick_steps.push_back (behaviors.back ().mode == BehaviorMode::rvb_mill
                                      ? cfg.steps_per (behaviors.back ().heading_update_dt, "behavior.heading_update_dt")
                                      : 0);
        }

        RunLog log;
        log.config = cfg;
        log.agents.resize (static_cast<std::size_t> (n));

        std::vector<AgentState> agents;
        std::vector<BehaviorState> states;
        const std::vector<Pose> poses = initial_poses (cfg);
        for (int i = 0; i < n; ++i)
        {
            const Pose &p = poses[static_cast<std::size_t> (i)];
            AgentState a;
            a.x = p.x;
            a.y = p.y;
            a.psi = normalize_angle (deg_to_rad (p.heading_deg));
            a.psi_cmd = a.psi;
            a.fx = behaviors[static_cast<std::size_t> (i)].fx;
            agents.push_back (a);
            states.push_back (make_behavior_state (a.psi));
            log.agents[static_cast<std::size_t> (i)].trajectory.agent_id = i;
        }

        Channel channel (cfg.channel, n, channel_seed (cfg.seed));

        auto truth = [&] {
            std::vector<TruthSample> out;
            out.reserve (agents.size ());
            for (const AgentState &a : agents)
                out.push_back ({a.position (), a.water_velocity () + cfg.flow});
            return out;
        };

        auto apply = [&] (int i, const Command &c, double t) {
            if (!c.psi_cmd)
                return;
            auto idx = static_cast<std::size_t> (i);
            agents[idx].psi_cmd = *c.psi_cmd;
            log.agents[idx].commands.push_back ({t, *c.psi_cmd, agents[idx].fx, c.reason});
        };

        struct Pending
        {
            ScheduledMessage message;
            double t_start = 0.0;
            std::vector<TruthSample> snapshot;
        };
        std::optional<Pending> pending;

        for (std::int64_t s = 0; s <= steps; ++s)
        {
            const double t = static_cast<double> (s) * dt;

            if (s % slot_steps == 0)
            {
                if (pending)
                {
                    const int who = pending->message.agent;
                    const auto idx = static_cast<std::size_t> (who);
                    if (pending->message.kind == MessageKind::ranging)
                    {
                        const bool delayed = cfg.channel.latency_slots > 0;
                        const std::vector<TruthSample> sampled = delayed ? pending->snapshot : truth ();
                        if (auto sample = channel.measure_range (sampled, who, delayed ? pending->t_start : t, t))
                        {
                            log.agents[idx].ranges.push_back (*sample);
                            apply (who, on_range (states[idx], behaviors[idx], *sample, agents[idx].psi), t);
                        }
                    }
                    else if (pending->message.kind == MessageKind::broadcast && cfg.channel.rate_source == RateSource::doppler)
                    {
                        const std::vector<TruthSample> now = truth ();
                        for (int i = 0; i < n; ++i)
                        {
                            const auto j = static_cast<std::size_t> (i);
                            if (auto rate = channel.measure_doppler (now, i, t))
                            {
                                log.agents[j].rates.push_back (*rate);
                                on_rate (states[j], behaviors[j], *rate, agents[j].psi);
                            }
                        }
                    }
                }
                Pending next;
                next.message = schedule_slot (cfg.channel, n, s / slot_steps);
                next.t_start = t;
                if (next.message.kind == MessageKind::ranging && cfg.channel.latency_slots > 0)
                    next.snapshot = truth ();
                pending = std::move (next);
            }

            for (int i = 0; i < n; ++i)
            {
                const auto idx = static_cast<std::size_t> (i);
                if (tick_steps[idx] > 0 && s > 0 && s % tick_steps[idx] == 0)
                    apply (i, on_heading_tick (states[idx], behaviors[idx]), t);
            }

            for (int i = 0; i < n; ++i)
            {
                const auto idx = static_cast<std::size_t> (i);
                on_heading_sample (states[idx], behaviors[idx], t, agents[idx].psi);
            }

            if (s % log_steps == 0)
                for (int i = 0; i < n; ++i)
                {
                    const AgentState &a = agents[static_cast<std::size_t> (i)];
                    log.agents[static_cast<std::size_t> (i)].trajectory.samples.push_back (make_sample (t, a.x, a.y, a.psi));
                }

            if (s < steps)
                for (AgentState &a : agents)
                    a = step (a, cfg.dynamics, cfg.flow);
        }
        return log;
    }

} // namespace fencemill
