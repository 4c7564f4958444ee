#pragma once
/**
 * @file   replay.hpp
 * @brief  Re-run a logged scenario and locate the first difference.
 */

#include "scenario.hpp"

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace fencemill
{
    struct Divergence
    {
        int agent = -1;       ///< -1 for whole-log differences
        std::string stream;   ///< trajectory, ranges, rates, commands or agents
        std::size_t index = 0;
        std::string detail;
    };

    [[nodiscard]] inline std::string describe (const Divergence &d)
    {
        std::string s = d.stream;
        if (d.agent >= 0)
            s += " of agent " + std::to_string (d.agent);
        s += " differs at entry " + std::to_string (d.index);
        if (!d.detail.empty ())
            s += ": " + d.detail;
        return s;
    }

    namespace detail
    {
        [[nodiscard]] inline std::string num (double v)
        {
            char buf[64];
            std::snprintf (buf, sizeof buf, "%.17g", v);
            return buf;
        }

        [[nodiscard]] inline std::string show (const TrajectorySample &s) { return "t=" + num (s.t) + " x=" + num (s.x) + " y=" + num (s.y) + " psi=" + num (s.psi); }
        [[nodiscard]] inline std::string show (const RangeSample &s) { return "t=" + num (s.t_recv) + " r=" + num (s.r) + " u_r=" + (s.u_r ? num (*s.u_r) : std::string ("-")); }
        [[nodiscard]] inline std::string show (const RateSample &s) { return "t=" + num (s.t) + " u_r=" + num (s.u_r); }
        [[nodiscard]] inline std::string show (const CommandEvent &c)
        {
            return "t=" + num (c.t) + " psi_cmd=" + num (c.psi_cmd) + " fx=" + num (c.fx) + " reason=" + std::string (to_string (c.reason));
        }

        template <typename T>
        [[nodiscard]] std::optional<Divergence> compare_stream (int agent, const char *name, const std::vector<T> &expected, const std::vector<T> &actual)
        {
            const std::size_t n = std::min (expected.size (), actual.size ());
            for (std::size_t i = 0; i < n; ++i)
                if (!(expected[i] == actual[i]))
                    return Divergence {agent, name, i, "logged " + show (expected[i]) + ", replayed " + show (actual[i])};
            if (expected.size () != actual.size ())
                return Divergence {agent, name, n, "logged " + std::to_string (expected.size ()) + " entries, replayed " + std::to_string (actual.size ())};
            return std::nullopt;
        }
    } // namespace detail

    /// First difference between two logs, checking each agent's streams in
    /// order: trajectory, ranges, rates, commands.
    [[nodiscard]] inline std::optional<Divergence> first_divergence (const RunLog &expected, const RunLog &actual)
    {
        if (expected.agents.size () != actual.agents.size ())
            return Divergence {-1, "agents", 0, std::to_string (expected.agents.size ()) + " vs " + std::to_string (actual.agents.size ())};
        for (std::size_t i = 0; i < expected.agents.size (); ++i)
        {
            const AgentLog &e = expected.agents[i];
            const AgentLog &a = actual.agents[i];
            const int id = static_cast<int> (i);
            if (auto d = detail::compare_stream (id, "trajectory", e.trajectory.samples, a.trajectory.samples))
                return d;
            if (auto d = detail::compare_stream (id, "ranges", e.ranges, a.ranges))
                return d;
            if (auto d = detail::compare_stream (id, "rates", e.rates, a.rates))
                return d;
            if (auto d = detail::compare_stream (id, "commands", e.commands, a.commands))
                return d;
        }
        return std::nullopt;
    }

    struct ReplayResult
    {
        bool version_ok = true;
        std::string logged_version;
        std::optional<Divergence> divergence;
        RunLog replayed;

        [[nodiscard]] bool exact () const noexcept { return version_ok && !divergence; }
    };

    /// Re-executes `log` from its configuration snapshot. A log written by a
    /// different format version is flagged and not re-run.
    [[nodiscard]] inline ReplayResult replay (const RunLog &log)
    {
        ReplayResult res;
        res.logged_version = log.version;
        if (log.version != kLogFormatVersion)
        {
            res.version_ok = false;
            return res;
        }
        res.replayed = run (log.config);
        res.divergence = first_divergence (log, res.replayed);
        return res;
    }

} // namespace fencemill
