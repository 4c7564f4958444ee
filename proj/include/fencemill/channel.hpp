#pragma once
/**
 * @file   channel.hpp
 * @brief  Acoustic link between the beacon and the agents.
 *
 * Time is divided into slots of one packet transmission each. Two schedules
 * are supported:
 *
 *  - `simple`: one ranging exchange per slot, round-robin over agents. This
 *    is the "one slot per agent" quantization used for simulation campaigns.
 *  - `protocol`: each agent's turn is three slots (unicast ping, ack,
 *    broadcast), round-robin over agents.
 *
 * A range is sampled at the start of the slot that carries it and delivered
 * at the end of that slot, so every range arrives one slot late (this
 * latency can be switched off). Range rates
 * come either from differencing consecutive ranges or from the Doppler shift
 * of a received packet; in protocol mode every broadcast yields a Doppler
 * rate for every agent.
 */

#include "angles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace fencemill
{
    enum class RateSource
    {
        consecutive,
        doppler
    };

    enum class TimingMode
    {
        simple,
        protocol
    };

    enum class MessageKind
    {
        ping,
        ranging,
        broadcast
    };

    struct ChannelConfig
    {
        double slot_time = 1.0;         ///< s per packet
        double loss_prob = 0.0;         ///< per-packet drop probability
        RateSource rate_source = RateSource::consecutive;
        double range_noise_std = 0.0;   ///< m
        double doppler_noise_std = 0.0; ///< m/s
        double ranging_increment = 0.0; ///< m, 0 disables quantization
        TimingMode timing_mode = TimingMode::simple;
        int latency_slots = 1;          ///< 1: sampled at slot start; 0: sampled on delivery

        void validate () const
        {
            if (latency_slots != 0 && latency_slots != 1)
                throw std::invalid_argument ("channel.latency_slots must be 0 or 1");
            if (!(slot_time > 0.0))
                throw std::invalid_argument ("channel.slot_time must be positive");
            if (!(loss_prob >= 0.0 && loss_prob < 1.0))
                throw std::invalid_argument ("channel.loss_prob must lie in [0, 1)");
            if (!(range_noise_std >= 0.0) || !(doppler_noise_std >= 0.0))
                throw std::invalid_argument ("channel noise standard deviations must be non-negative");
            if (!(ranging_increment >= 0.0))
                throw std::invalid_argument ("channel.ranging_increment must be non-negative");
        }

        friend bool operator== (const ChannelConfig &, const ChannelConfig &) = default;
    };

    struct ScheduledMessage
    {
        int agent = 0;
        MessageKind kind = MessageKind::ranging;

        friend bool operator== (const ScheduledMessage &, const ScheduledMessage &) = default;
    };

    [[nodiscard]] constexpr std::int64_t slots_per_turn (TimingMode mode) noexcept { return mode == TimingMode::simple ? 1 : 3; }

    /// Message carried by slot `slot` (the interval [slot, slot+1) * slot_time).
    [[nodiscard]] inline ScheduledMessage schedule_slot (const ChannelConfig &cfg, int n_agents, std::int64_t slot)
    {
        if (n_agents < 1)
            throw std::invalid_argument ("schedule requires at least one agent");
        const std::int64_t per_turn = slots_per_turn (cfg.timing_mode);
        const std::int64_t turn = slot / per_turn;
        const auto agent = static_cast<int> (turn % n_agents);
        if (cfg.timing_mode == TimingMode::simple)
            return {agent, MessageKind::ranging};
        switch (slot % per_turn)
        {
        case 0: return {agent, MessageKind::ping};
        case 1: return {agent, MessageKind::ranging};
        default: return {agent, MessageKind::broadcast};
        }
    }

    /// Message starting at time `t`, or nothing when `t` is not a slot boundary.
    [[nodiscard]] inline std::optional<ScheduledMessage> schedule_tick (const ChannelConfig &cfg, int n_agents, double t)
    {
        if (t < 0.0)
            return std::nullopt;
        const double slot = std::round (t / cfg.slot_time);
        if (std::abs (slot * cfg.slot_time - t) > 1e-9 * std::max (1.0, t))
            return std::nullopt;
        return schedule_slot (cfg, n_agents, static_cast<std::int64_t> (slot));
    }

    /// Interval between two range deliveries to the same agent, loss-free.
    [[nodiscard]] inline double range_update_period (const ChannelConfig &cfg, int n_agents) noexcept
    {
        return static_cast<double> (slots_per_turn (cfg.timing_mode) * n_agents) * cfg.slot_time;
    }

    struct RangeSample
    {
        int agent_id = 0;
        double t_meas = 0.0; ///< when the true range was sampled
        double t_recv = 0.0; ///< when the agent receives it
        double r = 0.0;
        std::optional<double> u_r; ///< range rate, positive when receding
        RateSource source = RateSource::consecutive;

        friend bool operator== (const RangeSample &, const RangeSample &) = default;
    };

    /// Doppler range rate heard on a broadcast; carries no range.
    struct RateSample
    {
        int agent_id = 0;
        double t = 0.0;
        double u_r = 0.0;

        friend bool operator== (const RateSample &, const RateSample &) = default;
    };

    /// Ground-truth kinematics the channel observes.
    struct TruthSample
    {
        Vec2 position;
        Vec2 velocity; ///< world frame, over ground
    };

    [[nodiscard]] inline double radial_velocity (const TruthSample &truth) noexcept
    {
        const double r = norm (truth.position);
        return r > 0.0 ? dot (truth.position, truth.velocity) / r : 0.0;
    }

    /// Rounds `r` to the nearest multiple of `increment`; 0 disables.
    [[nodiscard]] inline double quantize_range (double r, double increment) noexcept
    {
        if (increment <= 0.0)
            return r;
        return std::round (r / increment) * increment;
    }

    class Channel
    {
    public:
        Channel (const ChannelConfig &cfg, int n_agents, std::uint64_t seed)
            : cfg_ (cfg), rng_ (seed), previous_ (static_cast<std::size_t> (n_agents))
        {
            cfg_.validate ();
            if (n_agents < 1)
                throw std::invalid_argument ("channel requires at least one agent");
        }

        [[nodiscard]] const ChannelConfig &config () const noexcept { return cfg_; }

        /// Range exchange sampled at `t_meas` and received at `t_recv`.
        /// Returns nothing when the packet is lost. Every call consumes the
        /// same number of random draws, lost or not.
        std::optional<RangeSample> measure_range (std::span<const TruthSample> truth, int agent, double t_meas, double t_recv)
        {
            const TruthSample &a = truth[static_cast<std::size_t> (agent)];
            const bool lost = draw_loss ();
            const double range_noise = draw_gaussian () * cfg_.range_noise_std;
            const double rate_noise = draw_gaussian () * cfg_.doppler_noise_std;
            if (lost)
                return std::nullopt;

            RangeSample s;
            s.agent_id = agent;
            s.t_meas = t_meas;
            s.t_recv = t_recv;
            s.r = quantize_range (std::max (0.0, norm (a.position) + range_noise), cfg_.ranging_increment);
            s.source = cfg_.rate_source;

            auto &prev = previous_[static_cast<std::size_t> (agent)];
            if (cfg_.rate_source == RateSource::doppler)
                s.u_r = radial_velocity (a) + rate_noise;
            else if (prev && t_meas > prev->t)
                s.u_r = (s.r - prev->r) / (t_meas - prev->t);
            prev = Stored {t_meas, s.r};
            return s;
        }

        /// Doppler rate heard by `agent` on a broadcast received at `t`.
        std::optional<RateSample> measure_doppler (std::span<const TruthSample> truth, int agent, double t)
        {
            const TruthSample &a = truth[static_cast<std::size_t> (agent)];
            const bool lost = draw_loss ();
            const double rate_noise = draw_gaussian () * cfg_.doppler_noise_std;
            if (lost)
                return std::nullopt;
            return RateSample {agent, t, radial_velocity (a) + rate_noise};
        }

    private:
        struct Stored
        {
            double t;
            double r;
        };

        bool draw_loss () { return std::uniform_real_distribution<double> (0.0, 1.0) (rng_) < cfg_.loss_prob; }
        double draw_gaussian () { return std::normal_distribution<double> (0.0, 1.0) (rng_); }

        ChannelConfig cfg_;
        std::mt19937_64 rng_;
        std::vector<std::optional<Stored>> previous_;
    };

} // namespace fencemill
