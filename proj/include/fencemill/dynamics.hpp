#pragma once
/**
 * @file   dynamics.hpp
 * @brief  Planar surge/sway model of an under-actuated AUV.
 *
 * The vehicle is commanded with a surge force and an absolute heading. The
 * heading slews toward its command at a fixed rate; surge and sway velocities
 * are integrated with linear plus quadratic drag (explicit Euler), and the
 * body velocities are rotated into the world frame as
 *
 *     x += (u cos psi + v sin psi) dt
 *     y += (u sin psi - v cos psi) dt
 *
 * A constant ambient flow is added to the world-frame displacement.
 */

#include "angles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fencemill
{
    struct DynamicsParams
    {
        double x_u = 0.1;   ///< linear surge drag, N s/m
        double x_uu = 4.04; ///< quadratic surge drag, N s^2/m^2
        double y_v = 0.1;   ///< linear sway drag, N s/m
        double y_vv = 20.0; ///< quadratic sway drag, N s^2/m^2
        double mass = 6.0;  ///< dry plus added mass, kg
        double heading_rate_deg = 30.0; ///< slew rate, deg/s
        double dt = 0.05;   ///< integration step, s

        void validate () const
        {
            if (!(mass > 0.0))
                throw std::invalid_argument ("dynamics.mass must be positive");
            if (!(dt > 0.0))
                throw std::invalid_argument ("dynamics.dt must be positive");
            if (!(heading_rate_deg > 0.0))
                throw std::invalid_argument ("dynamics.heading_rate must be positive");
            if (x_u < 0.0 || x_uu < 0.0 || y_v < 0.0 || y_vv < 0.0)
                throw std::invalid_argument ("drag coefficients must be non-negative");
        }

        friend bool operator== (const DynamicsParams &, const DynamicsParams &) = default;
    };

    struct AgentState
    {
        double x = 0.0;       ///< m, beacon at the origin
        double y = 0.0;       ///< m
        double u = 0.0;       ///< surge velocity, m/s (body)
        double v = 0.0;       ///< sway velocity, m/s (body)
        double psi = 0.0;     ///< heading, rad
        double psi_cmd = 0.0; ///< commanded heading, rad
        double fx = 0.0;      ///< commanded surge force, N

        [[nodiscard]] Vec2 position () const noexcept { return {x, y}; }

        /// World-frame velocity through the water (flow excluded).
        [[nodiscard]] Vec2 water_velocity () const noexcept
        {
            const double c = std::cos (psi), s = std::sin (psi);
            return {u * c + v * s, u * s - v * c};
        }

        friend bool operator== (const AgentState &, const AgentState &) = default;
    };

    /// Rate-limited slew of `psi` toward `target` along the shorter arc,
    /// stopping exactly on the target when it is reachable this step.
    [[nodiscard]] inline double slew_heading (double psi, double target, double max_step) noexcept
    {
        const double diff = angle_difference (target, psi);
        if (std::abs (diff) <= max_step)
            return normalize_angle (target);
        return normalize_angle (psi + std::copysign (max_step, diff));
    }

    [[nodiscard]] inline AgentState step (const AgentState &s, const DynamicsParams &p, Vec2 flow = {}) noexcept
    {
        AgentState next = s;
        next.psi = slew_heading (s.psi, s.psi_cmd, deg_to_rad (p.heading_rate_deg) * p.dt);
        next.psi_cmd = normalize_angle (s.psi_cmd);

        const double force_u = s.fx - p.x_uu * s.u * std::abs (s.u) - p.x_u * s.u;
        const double force_v = -p.y_vv * s.v * std::abs (s.v) - p.y_v * s.v;
        next.u = s.u + force_u / p.mass * p.dt;
        next.v = s.v + force_v / p.mass * p.dt;

        const double c = std::cos (next.psi), sn = std::sin (next.psi);
        next.x = s.x + (next.u * c + next.v * sn) * p.dt + flow.x * p.dt;
        next.y = s.y + (next.u * sn - next.v * c) * p.dt + flow.y * p.dt;
        return next;
    }

    /// Equilibrium surge speed: the non-negative root of x_uu u^2 + x_u u = fx.
    [[nodiscard]] inline double terminal_surge_speed (const DynamicsParams &p, double fx) noexcept
    {
        if (fx <= 0.0)
            return 0.0;
        if (p.x_uu == 0.0)
            return p.x_u > 0.0 ? fx / p.x_u : std::numeric_limits<double>::infinity ();
        return (-p.x_u + std::sqrt (p.x_u * p.x_u + 4.0 * p.x_uu * fx)) / (2.0 * p.x_uu);
    }

} // namespace fencemill
