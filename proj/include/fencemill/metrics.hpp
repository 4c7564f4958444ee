#pragma once
/**
 * @file   metrics.hpp
 * @brief  Fencing and milling performance metrics over trajectory logs.
 *
 * Fencing is scored per "dip", the stretch from leaving the boundary to
 * re-entering it: the dip peak is its largest radial overshoot, MRE the
 * largest peak, MPE the mean peak and ART the mean dip duration.
 *
 * Milling is scored on the radial error e(t) = r(t) - R_d(theta(t)): MRE is
 * the largest outward error, accuracy the mean error and precision the RMS
 * spread of r(t) about its own mean.
 */

#include "angles.hpp"
#include "shapes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fencemill
{
    struct TrajectorySample
    {
        double t = 0.0;
        double x = 0.0;
        double y = 0.0;
        double r = 0.0;
        double theta = 0.0; ///< true bearing of the agent from the beacon
        double psi = 0.0;

        friend bool operator== (const TrajectorySample &, const TrajectorySample &) = default;
    };

    [[nodiscard]] inline TrajectorySample make_sample (double t, double x, double y, double psi) noexcept
    {
        return {t, x, y, std::hypot (x, y), std::atan2 (y, x), psi};
    }

    struct Trajectory
    {
        int agent_id = 0;
        std::vector<TrajectorySample> samples;

        friend bool operator== (const Trajectory &, const Trajectory &) = default;
    };

    struct Dip
    {
        double t_start = 0.0;
        double t_end = 0.0;
        double peak = 0.0;        ///< largest r - R_d inside the dip, m
        double return_time = 0.0; ///< t_end - t_start, s
        bool complete = false;    ///< false when the log ends outside
        Vec2 peak_position;       ///< where the peak occurred
        Vec2 centroid;            ///< mean position over the outside samples
    };

    [[nodiscard]] inline std::vector<Dip> segment_dips (std::span<const TrajectorySample> samples, const ShapeSpec &shape)
    {
        std::vector<Dip> dips;
        std::optional<Dip> open;
        std::size_t open_from = 0;
        Vec2 sum;
        std::size_t count = 0;
        auto close = [&] {
            open->centroid = (1.0 / static_cast<double> (count)) * sum;
            dips.push_back (*open);
            open.reset ();
        };

        for (std::size_t i = 0; i < samples.size (); ++i)
        {
            const TrajectorySample &s = samples[i];
            const double error = s.r - shape.radius_at (s.theta);
            const bool outside = error > 0.0;
            if (outside)
            {
                if (!open)
                {
                    open = Dip {s.t, s.t, error, 0.0, false, {s.x, s.y}, {}};
                    open_from = i;
                    sum = {};
                    count = 0;
                }
                else if (error > open->peak)
                {
                    open->peak = error;
                    open->peak_position = {s.x, s.y};
                }
                sum = sum + Vec2 {s.x, s.y};
                ++count;
            }
            else if (open)
            {
                open->t_end = s.t;
                open->return_time = s.t - open->t_start;
                open->complete = true;
                close ();
            }
        }

        if (open)
        {
            // Ends outside: close at the closest approach after the peak.
            double peak_t = open->t_start;
            for (std::size_t i = open_from; i < samples.size (); ++i)
                if (samples[i].r - shape.radius_at (samples[i].theta) == open->peak)
                {
                    peak_t = samples[i].t;
                    break;
                }
            double best = open->peak;
            double best_t = peak_t;
            for (std::size_t i = open_from; i < samples.size (); ++i)
            {
                if (samples[i].t < peak_t)
                    continue;
                const double error = samples[i].r - shape.radius_at (samples[i].theta);
                if (error <= best)
                {
                    best = error;
                    best_t = samples[i].t;
                }
            }
            open->t_end = best_t;
            open->return_time = best_t - open->t_start;
            open->complete = false;
            close ();
        }
        return dips;
    }

    [[nodiscard]] inline std::vector<Dip> segment_dips (const Trajectory &traj, const ShapeSpec &shape)
    {
        return segment_dips (std::span<const TrajectorySample> (traj.samples), shape);
    }

    struct FencingMetrics
    {
        double mre = 0.0;
        double mpe = 0.0;
        std::optional<double> art; ///< absent when no dip completed
        std::size_t dips = 0;
        std::size_t complete_dips = 0;
    };

    /// Absent when there are no dips.
    [[nodiscard]] inline std::optional<FencingMetrics> fencing_metrics (std::span<const Dip> dips)
    {
        if (dips.empty ())
            return std::nullopt;
        FencingMetrics m;
        double sum_peak = 0.0, sum_return = 0.0;
        for (const Dip &d : dips)
        {
            m.mre = std::max (m.mre, d.peak);
            sum_peak += d.peak;
            if (d.complete)
            {
                sum_return += d.return_time;
                ++m.complete_dips;
            }
        }
        m.dips = dips.size ();
        m.mpe = sum_peak / static_cast<double> (dips.size ());
        if (m.complete_dips > 0)
            m.art = sum_return / static_cast<double> (m.complete_dips);
        return m;
    }

    struct MillingOptions
    {
        double skip = 0.0;                 ///< mean/precision ignore samples before this time, s
        bool stats_after_settle = true;    ///< mean/precision only over the settled part
        double settle_band_fraction = 0.1; ///< |e| band as a fraction of the nominal radius
        double settle_window = 30.0;       ///< s the log must continue after settling
    };

    struct MillingMetrics
    {
        double mre = 0.0;
        double r_mean = 0.0;
        double accuracy = 0.0;  ///< mean radial error
        double precision = 0.0; ///< RMS of r about r_mean
        std::optional<double> settle_time;
        std::size_t n = 0;
    };

    /// Earliest time after which |e| stays inside the band to the end of the
    /// log, provided at least `window` seconds of log follow it.
    [[nodiscard]] inline std::optional<double> settle_time (std::span<const TrajectorySample> samples, const ShapeSpec &shape, double band, double window)
    {
        if (samples.empty ())
            return std::nullopt;
        std::size_t first_good = 0;
        for (std::size_t i = samples.size (); i-- > 0;)
            if (std::abs (samples[i].r - shape.radius_at (samples[i].theta)) > band)
            {
                first_good = i + 1;
                break;
            }
        if (first_good >= samples.size ())
            return std::nullopt;
        const double t = samples[first_good].t;
        if (samples.back ().t - t < window)
            return std::nullopt;
        return t;
    }

    [[nodiscard]] inline MillingMetrics milling_metrics (const Trajectory &traj, const ShapeSpec &shape, const MillingOptions &opt = {})
    {
        MillingMetrics m;
        const auto all = std::span<const TrajectorySample> (traj.samples);
        auto from = [&] (double t0) {
            auto it = std::lower_bound (all.begin (), all.end (), t0, [] (const TrajectorySample &s, double t) { return s.t < t; });
            return all.subspan (static_cast<std::size_t> (it - all.begin ()));
        };

        m.settle_time = settle_time (all, shape, opt.settle_band_fraction * shape.nominal_radius (), opt.settle_window);

        for (const TrajectorySample &s : all)
            m.mre = std::max (m.mre, s.r - shape.radius_at (s.theta));

        double stats_from = opt.skip;
        if (opt.stats_after_settle && m.settle_time)
            stats_from = std::max (stats_from, *m.settle_time);
        const auto stats = from (stats_from);
        m.n = stats.size ();
        if (stats.empty ())
            return m;

        double sum_r = 0.0, sum_e = 0.0;
        for (const TrajectorySample &s : stats)
        {
            sum_r += s.r;
            sum_e += s.r - shape.radius_at (s.theta);
        }
        const double n = static_cast<double> (stats.size ());
        m.r_mean = sum_r / n;
        m.accuracy = sum_e / n;
        double sum_sq = 0.0;
        for (const TrajectorySample &s : stats)
            sum_sq += (s.r - m.r_mean) * (s.r - m.r_mean);
        m.precision = std::sqrt (sum_sq / n);
        return m;
    }

    /// Combines per-agent milling results: worst MRE, mean accuracy and
    /// radius, RMS precision, and mean settle time when every agent settled.
    [[nodiscard]] inline MillingMetrics aggregate_milling (std::span<const MillingMetrics> per_agent)
    {
        MillingMetrics m;
        if (per_agent.empty ())
            return m;
        double settle_sum = 0.0;
        bool all_settled = true;
        double sum_var = 0.0;
        for (const MillingMetrics &a : per_agent)
        {
            m.mre = std::max (m.mre, a.mre);
            m.r_mean += a.r_mean;
            m.accuracy += a.accuracy;
            sum_var += a.precision * a.precision;
            m.n += a.n;
            if (a.settle_time)
                settle_sum += *a.settle_time;
            else
                all_settled = false;
        }
        const double k = static_cast<double> (per_agent.size ());
        m.r_mean /= k;
        m.accuracy /= k;
        m.precision = std::sqrt (sum_var / k);
        if (all_settled)
            m.settle_time = settle_sum / k;
        return m;
    }

} // namespace fencemill
