#pragma once
/**
 * @file   behaviors.hpp
 * @brief  Fencing and milling controllers driven by beacon ranges.
 *
 * Four controllers share one event interface:
 *
 *  - range-variation fencing: outside the boundary, keep rotating by a fixed
 *    step each range, reversing direction whenever the range grew faster
 *    than it did the step before;
 *  - range-variation milling: correct heading in proportion to the radial
 *    error only when the vehicle is drifting further from the path, plus an
 *    optional periodic turn-rate term outside it;
 *  - heading-estimation fencing: estimate the beacon bearing from range
 *    rates and point straight home once outside;
 *  - heading-estimation milling: track the path tangent at the estimated
 *    bearing, with a proportional correction on the radial error.
 *
 * Controllers never read ground truth. State lives in BehaviorState and is
 * owned by one agent; each handler mutates it and returns the command it
 * emits, so replaying the same events reproduces the same commands.
 */

#include "angles.hpp"
#include "channel.hpp"
#include "estimator.hpp"
#include "shapes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fencemill
{
    enum class BehaviorMode
    {
        rvb_fence,
        rvb_mill,
        heb_fence,
        heb_mill
    };

    [[nodiscard]] constexpr std::string_view to_string (BehaviorMode m) noexcept
    {
        switch (m)
        {
        case BehaviorMode::rvb_fence: return "rvb_fence";
        case BehaviorMode::rvb_mill: return "rvb_mill";
        case BehaviorMode::heb_fence: return "heb_fence";
        case BehaviorMode::heb_mill: return "heb_mill";
        }
        return "heb_fence";
    }

    [[nodiscard]] constexpr bool is_heading_estimation (BehaviorMode m) noexcept
    {
        return m == BehaviorMode::heb_fence || m == BehaviorMode::heb_mill;
    }

    /// Which heading a range rate is paired with in the estimator window.
    enum class HeadingPairing
    {
        reception,  ///< heading when the rate arrives
        measurement ///< own heading history over the interval the rate describes
    };

    struct BehaviorState;

    /// Optional in-boundary behaviour for the fencing modes. Returns a new
    /// heading command, or nothing to keep the current one.
    using InBoundaryHook = std::function<std::optional<double> (const BehaviorState &, const RangeSample &, double psi_now)>;

    struct BehaviorConfig
    {
        BehaviorMode mode = BehaviorMode::heb_fence;
        ShapeSpec shape = ShapeSpec::circle (30.0);
        Rotation direction = Rotation::cw;
        double gain_deg_per_m = 20.0;      ///< k
        double rate_gain_deg_per_s = 0.0;  ///< k_rate
        double rotation_step_deg = 20.0;   ///< fencing rotation increment
        int window_len = 5;                ///< estimator FIFO length
        double window_max_age = 0.0;       ///< s, 0 keeps entries until pushed out
        double heading_update_dt = 1.0;    ///< s between turn-rate ticks
        double fx = 0.5;                   ///< cruise surge force, N
        double min_conditioning = 0.05;    ///< about 3 degrees of heading spread in the window
        double max_correction_deg = 60.0;  ///< clamp on the milling correction term
        HeadingPairing pairing = HeadingPairing::measurement;
        InBoundaryHook in_boundary;

        void validate () const
        {
            if (gain_deg_per_m < 0.0 || rate_gain_deg_per_s < 0.0)
                throw std::invalid_argument ("behavior gains must be non-negative");
            if (mode == BehaviorMode::rvb_fence && !(rotation_step_deg > 0.0))
                throw std::invalid_argument ("behavior.delta_psi must be positive for rvb_fence");
            if (is_heading_estimation (mode) && window_len < 2)
                throw std::invalid_argument ("behavior.window_len must be at least 2");
            if (!(heading_update_dt > 0.0))
                throw std::invalid_argument ("behavior.heading_update_dt must be positive");
            if (window_max_age < 0.0)
                throw std::invalid_argument ("behavior.window_max_age must be non-negative");
            if (!(max_correction_deg > 0.0))
                throw std::invalid_argument ("behavior.max_correction must be positive");
            if (!is_heading_estimation (mode) && shape.kind () != ShapeKind::circle)
                throw std::invalid_argument ("range-variation behaviors only support circular shapes");
        }
    };

    struct RangeRecord
    {
        double t = 0.0; ///< measurement time
        double r = 0.0;

        friend bool operator== (const RangeRecord &, const RangeRecord &) = default;
    };

    struct HeadingRecord
    {
        double t = 0.0;
        double psi = 0.0;

        friend bool operator== (const HeadingRecord &, const HeadingRecord &) = default;
    };

    struct BehaviorState
    {
        std::deque<RangeRecord> range_history; ///< last three, oldest first
        int rotation_dir = +1;
        std::deque<EstimatorEntry> window;
        double psi_cmd = 0.0;
        ThetaEstimate last_theta;
        std::optional<double> last_valid_theta;
        std::deque<HeadingRecord> heading_log; ///< own compass history since the last range

        friend bool operator== (const BehaviorState &, const BehaviorState &) = default;
    };

    enum class CommandReason
    {
        hold,           ///< no new heading
        inside,         ///< fencing, inside the boundary
        rotate,         ///< fencing rotation step, same direction
        flip_rotate,    ///< fencing rotation step after reversing
        return_home,    ///< heading-estimation fencing, point at the beacon
        fallback_rotate,///< heading-estimation fencing, estimator degenerate
        correct,        ///< milling proportional correction
        track,          ///< heading-estimation milling command
        coast,          ///< heading-estimation milling, estimator not ready
        excite,         ///< heading-estimation milling, estimator degenerate
        rate_tick       ///< periodic turn-rate increment
    };

    [[nodiscard]] constexpr std::string_view to_string (CommandReason r) noexcept
    {
        switch (r)
        {
        case CommandReason::hold: return "hold";
        case CommandReason::inside: return "inside";
        case CommandReason::rotate: return "rotate";
        case CommandReason::flip_rotate: return "flip_rotate";
        case CommandReason::return_home: return "return_home";
        case CommandReason::fallback_rotate: return "fallback_rotate";
        case CommandReason::correct: return "correct";
        case CommandReason::track: return "track";
        case CommandReason::coast: return "coast";
        case CommandReason::excite: return "excite";
        case CommandReason::rate_tick: return "rate_tick";
        }
        return "hold";
    }

    struct Command
    {
        std::optional<double> psi_cmd; ///< new absolute heading, rad
        CommandReason reason = CommandReason::hold;

        friend bool operator== (const Command &, const Command &) = default;
    };

    [[nodiscard]] inline BehaviorState make_behavior_state (double initial_heading)
    {
        BehaviorState s;
        s.psi_cmd = normalize_angle (initial_heading);
        return s;
    }

    namespace detail
    {
        inline void record_range (BehaviorState &state, const RangeSample &sample)
        {
            state.range_history.push_back ({sample.t_meas, sample.r});
            while (state.range_history.size () > 3)
                state.range_history.pop_front ();
        }

        inline void push_rate (BehaviorState &state, const BehaviorConfig &cfg, double u_r, double psi, double t)
        {
            state.window.push_back ({u_r, psi, t});
            while (state.window.size () > static_cast<std::size_t> (cfg.window_len))
                state.window.pop_front ();
            if (cfg.window_max_age > 0.0)
                while (!state.window.empty () && state.window.front ().t < t - cfg.window_max_age)
                    state.window.pop_front ();
        }

        /// Heading to pair with the rate carried by `sample`. Must be called
        /// before the sample is recorded.
        [[nodiscard]] inline double paired_heading (const BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
        {
            if (cfg.pairing == HeadingPairing::reception || state.heading_log.empty ())
                return psi_now;
            if (sample.source == RateSource::doppler)
            {
                double psi = psi_now;
                for (const HeadingRecord &h : state.heading_log)
                    if (h.t <= sample.t_meas)
                        psi = h.psi;
                return psi;
            }
            // Secant rate: circular mean of the headings it spans.
            const double from = state.range_history.empty () ? sample.t_meas : state.range_history.back ().t;
            double c = 0.0, s = 0.0;
            for (const HeadingRecord &h : state.heading_log)
                if (h.t >= from && h.t < sample.t_meas)
                {
                    c += std::cos (h.psi);
                    s += std::sin (h.psi);
                }
            if (c == 0.0 && s == 0.0)
                return psi_now;
            return std::atan2 (s, c);
        }

        inline void refresh_estimate (BehaviorState &state, const BehaviorConfig &cfg)
        {
            const std::vector<EstimatorEntry> entries (state.window.begin (), state.window.end ());
            state.last_theta = estimate_theta (entries, cfg.min_conditioning);
            if (state.last_theta.valid)
                state.last_valid_theta = state.last_theta.theta;
        }

        inline Command set_heading (BehaviorState &state, double heading, CommandReason reason)
        {
            state.psi_cmd = normalize_angle (heading);
            return {state.psi_cmd, reason};
        }

        inline Command in_boundary (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
        {
            if (cfg.in_boundary)
                if (auto heading = cfg.in_boundary (state, sample, psi_now))
                    return set_heading (state, *heading, CommandReason::inside);
            return {std::nullopt, CommandReason::inside};
        }

        /// Rotation step shared by range-variation fencing and the
        /// heading-estimation fallback. Expects the sample already recorded.
        inline Command rotation_step (BehaviorState &state, const BehaviorConfig &cfg, double psi_now)
        {
            bool flipped = false;
            const auto &h = state.range_history;
            if (h.size () >= 3)
            {
                const double dr_last = h[2].r - h[1].r;
                const double dr_prev = h[1].r - h[0].r;
                if (dr_last > dr_prev)
                {
                    state.rotation_dir = -state.rotation_dir;
                    flipped = true;
                }
            }
            return set_heading (state, psi_now + deg_to_rad (cfg.rotation_step_deg) * state.rotation_dir,
                                flipped ? CommandReason::flip_rotate : CommandReason::rotate);
        }

        [[nodiscard]] inline double clamped_correction (const BehaviorConfig &cfg, double radial_error)
        {
            const double limit = deg_to_rad (cfg.max_correction_deg);
            const double raw = sign_of (cfg.direction) * deg_to_rad (cfg.gain_deg_per_m) * radial_error;
            return std::clamp (raw, -limit, limit);
        }
    } // namespace detail

    /// Range-variation fencing, one range event.
    inline Command rvb_fence_on_range (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
    {
        detail::record_range (state, sample);
        if (sample.r > cfg.shape.radius ())
            return detail::rotation_step (state, cfg, psi_now);
        return detail::in_boundary (state, cfg, sample, psi_now);
    }

    /// Range-variation milling, one range event. Corrects only while moving
    /// away from the path: inside and closing in, or outside and receding.
    inline Command rvb_mill_on_range (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
    {
        detail::record_range (state, sample);
        const auto &h = state.range_history;
        if (h.size () < 2)
            return {};
        const double r0 = cfg.shape.radius ();
        const double dr = h[h.size () - 1].r - h[h.size () - 2].r;
        const double r = sample.r;
        if ((r < r0 && dr < 0.0) || (r > r0 && dr > 0.0))
        {
            const double delta = sign_of (cfg.direction) * deg_to_rad (cfg.gain_deg_per_m) * (r - r0);
            return detail::set_heading (state, psi_now + delta, CommandReason::correct);
        }
        return {};
    }

    /// Periodic turn-rate term of range-variation milling, applied every
    /// `heading_update_dt` seconds on top of the current command.
    inline Command rvb_mill_heading_tick (BehaviorState &state, const BehaviorConfig &cfg, double r_latest)
    {
        const double r0 = cfg.shape.radius ();
        if (cfg.rate_gain_deg_per_s <= 0.0 || r_latest < r0)
            return {};
        const double ratio = r_latest > 0.0 ? r0 / r_latest : 1.0;
        const double rate = sign_of (cfg.direction) * deg_to_rad (cfg.rate_gain_deg_per_s) * ratio;
        return detail::set_heading (state, state.psi_cmd + rate * cfg.heading_update_dt, CommandReason::rate_tick);
    }

    /// Heading-estimation fencing, one range event.
    inline Command heb_fence_on_range (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
    {
        const double psi_rate = detail::paired_heading (state, cfg, sample, psi_now);
        detail::record_range (state, sample);
        if (sample.u_r)
            detail::push_rate (state, cfg, *sample.u_r, psi_rate, sample.t_recv);
        detail::refresh_estimate (state, cfg);

        if (state.last_theta.valid)
        {
            const double theta = state.last_theta.theta;
            if (sample.r > cfg.shape.radius_at (theta))
                return detail::set_heading (state, theta + kPi, CommandReason::return_home);
            return detail::in_boundary (state, cfg, sample, psi_now);
        }

        // Without a bearing, judge containment at the last known bearing, or
        // against the closest boundary point if none was ever estimated.
        double boundary = 0.0;
        if (state.last_valid_theta)
            boundary = cfg.shape.radius_at (*state.last_valid_theta);
        else if (cfg.shape.kind () == ShapeKind::circle)
            boundary = cfg.shape.radius ();
        else
        {
            boundary = cfg.shape.nominal_radius ();
            for (const Vec2 &v : cfg.shape.vertices ())
                boundary = std::min (boundary, cfg.shape.radius_at (std::atan2 (v.y, v.x)));
        }
        if (sample.r > boundary)
        {
            Command c = detail::rotation_step (state, cfg, psi_now);
            c.reason = CommandReason::fallback_rotate;
            return c;
        }
        return detail::in_boundary (state, cfg, sample, psi_now);
    }

    /// Heading-estimation milling, one range event.
    inline Command heb_mill_on_range (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
    {
        const double psi_rate = detail::paired_heading (state, cfg, sample, psi_now);
        detail::record_range (state, sample);
        if (sample.u_r)
            detail::push_rate (state, cfg, *sample.u_r, psi_rate, sample.t_recv);
        detail::refresh_estimate (state, cfg);

        if (state.last_theta.valid)
        {
            const double theta = state.last_theta.theta;
            const double error = sample.r - cfg.shape.radius_at (theta);
            return detail::set_heading (state, cfg.shape.desired_heading_at (theta, cfg.direction) + detail::clamped_correction (cfg, error),
                                        CommandReason::track);
        }
        // A full window that is still degenerate means straight-line motion;
        // turn once to make the headings distinguishable.
        if (state.window.size () >= static_cast<std::size_t> (cfg.window_len))
            return detail::set_heading (state, psi_now + sign_of (cfg.direction) * deg_to_rad (cfg.rotation_step_deg), CommandReason::excite);
        return {std::nullopt, CommandReason::coast};
    }

    /// Broadcast Doppler rate: feeds the estimator window, emits nothing.
    inline void heb_on_rate (BehaviorState &state, const BehaviorConfig &cfg, const RateSample &rate, double psi_now)
    {
        detail::push_rate (state, cfg, rate.u_r, psi_now, rate.t);
        detail::refresh_estimate (state, cfg);
    }

    /// Compass sample, taken every simulation step. Only the heading
    /// estimation modes keep it, and only back to the last range.
    inline void on_heading_sample (BehaviorState &state, const BehaviorConfig &cfg, double t, double psi)
    {
        if (!is_heading_estimation (cfg.mode) || cfg.pairing != HeadingPairing::measurement)
            return;
        state.heading_log.push_back ({t, psi});
        if (!state.range_history.empty ())
            while (state.heading_log.size () > 1 && state.heading_log.front ().t < state.range_history.back ().t)
                state.heading_log.pop_front ();
    }

    /// Dispatch a range event to the configured controller.
    inline Command on_range (BehaviorState &state, const BehaviorConfig &cfg, const RangeSample &sample, double psi_now)
    {
        switch (cfg.mode)
        {
        case BehaviorMode::rvb_fence: return rvb_fence_on_range (state, cfg, sample, psi_now);
        case BehaviorMode::rvb_mill: return rvb_mill_on_range (state, cfg, sample, psi_now);
        case BehaviorMode::heb_fence: return heb_fence_on_range (state, cfg, sample, psi_now);
        case BehaviorMode::heb_mill: return heb_mill_on_range (state, cfg, sample, psi_now);
        }
        return {};
    }

    inline void on_rate (BehaviorState &state, const BehaviorConfig &cfg, const RateSample &rate, double psi_now)
    {
        if (is_heading_estimation (cfg.mode))
            heb_on_rate (state, cfg, rate, psi_now);
    }

    /// Timer event; only range-variation milling uses it.
    inline Command on_heading_tick (BehaviorState &state, const BehaviorConfig &cfg)
    {
        if (cfg.mode != BehaviorMode::rvb_mill || state.range_history.empty ())
            return {};
        return rvb_mill_heading_tick (state, cfg, state.range_history.back ().r);
    }

} // namespace fencemill
