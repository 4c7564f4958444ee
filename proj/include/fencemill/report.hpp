#pragma once
/**
 * @file   report.hpp
 * @brief  Metrics of a whole run, and the comparison-table text layout.
 *
 * Fencing runs pool the dips of every agent. Milling runs are scored per
 * agent and combined with aggregate_milling(). By default metrics use the
 * simulator's true positions; MetricSource::ranges instead scores the
 * ranges the agents actually received, which is what a field log contains.
 */

#include "behaviors.hpp"
#include "metrics.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fencemill
{
    enum class MetricSource
    {
        truth,
        ranges
    };

    enum class BehaviorFamily
    {
        fencing,
        milling
    };

    [[nodiscard]] constexpr BehaviorFamily family_of (BehaviorMode m) noexcept
    {
        return (m == BehaviorMode::rvb_fence || m == BehaviorMode::heb_fence) ? BehaviorFamily::fencing : BehaviorFamily::milling;
    }

    struct MetricsReport
    {
        std::string scenario;
        std::string shape;
        double shape_size = 0.0; ///< nominal radius of the boundary, m
        std::string mode;
        int n_agents = 0;
        double fx = 0.0;
        BehaviorFamily family = BehaviorFamily::fencing;
        MetricSource source = MetricSource::truth;

        std::vector<Dip> dips;
        std::optional<FencingMetrics> fencing;       ///< absent without dips
        std::optional<Vec2> overshoot_centroid;      ///< mean of the dip centroids

        std::optional<MillingMetrics> milling;
        std::vector<MillingMetrics> milling_per_agent;
    };

    /// Trajectory rebuilt from delivered ranges: one sample per range at its
    /// measurement time. The bearing is taken from the true trajectory, since
    /// a range alone does not carry one.
    [[nodiscard]] inline Trajectory range_trajectory (const AgentLog &agent)
    {
        Trajectory out;
        out.agent_id = agent.trajectory.agent_id;
        const auto &truth = agent.trajectory.samples;
        std::size_t j = 0;
        for (const RangeSample &r : agent.ranges)
        {
            while (j + 1 < truth.size () && truth[j + 1].t <= r.t_meas)
                ++j;
            const double theta = truth.empty () ? 0.0 : truth[j].theta;
            const double psi = truth.empty () ? 0.0 : truth[j].psi;
            out.samples.push_back ({r.t_meas, r.r * std::cos (theta), r.r * std::sin (theta), r.r, theta, psi});
        }
        return out;
    }

    [[nodiscard]] inline MetricsReport evaluate (const RunLog &log, MetricSource source = MetricSource::truth)
    {
        const ScenarioConfig &cfg = log.config;
        MetricsReport rep;
        rep.scenario = cfg.name;
        rep.shape = cfg.shape ().label ();
        rep.shape_size = cfg.shape ().nominal_radius ();
        rep.mode = std::string (to_string (cfg.behavior_for (0).mode));
        rep.n_agents = cfg.n_agents;
        rep.fx = cfg.behavior_for (0).fx;
        rep.family = family_of (cfg.behavior_for (0).mode);
        rep.source = source;

        std::vector<Trajectory> trajectories;
        for (const AgentLog &a : log.agents)
            trajectories.push_back (source == MetricSource::truth ? a.trajectory : range_trajectory (a));

        if (rep.family == BehaviorFamily::fencing)
        {
            for (const Trajectory &t : trajectories)
            {
                const std::vector<Dip> d = segment_dips (t, cfg.shape ());
                rep.dips.insert (rep.dips.end (), d.begin (), d.end ());
            }
            rep.fencing = fencing_metrics (rep.dips);
            if (!rep.dips.empty ())
            {
                Vec2 sum;
                for (const Dip &d : rep.dips)
                    sum = sum + d.centroid;
                rep.overshoot_centroid = (1.0 / static_cast<double> (rep.dips.size ())) * sum;
            }
        }
        else
        {
            MillingOptions opt;
            opt.skip = cfg.metrics_skip;
            for (const Trajectory &t : trajectories)
                rep.milling_per_agent.push_back (milling_metrics (t, cfg.shape (), opt));
            rep.milling = aggregate_milling (rep.milling_per_agent);
        }
        return rep;
    }

    namespace detail
    {
        [[nodiscard]] inline std::string fixed3 (std::optional<double> v)
        {
            if (!v)
                return "-";
            char buf[64];
            std::snprintf (buf, sizeof buf, "%.3f", *v);
            return buf;
        }
    } // namespace detail

    /// Comparison rows, one per report, ordered by family then agent count.
    /// Fencing rows carry MRE, MPE and ART; milling rows MRE, precision and
    /// accuracy.
    [[nodiscard]] inline std::string render_table (std::span<const MetricsReport> reports, char sep = ',')
    {
        std::vector<const MetricsReport *> order;
        for (const MetricsReport &r : reports)
            order.push_back (&r);
        std::stable_sort (order.begin (), order.end (), [] (const MetricsReport *a, const MetricsReport *b) {
            if (a->family != b->family)
                return a->family < b->family;
            return a->n_agents < b->n_agents;
        });

        std::string out;
        auto row = [&] (std::initializer_list<std::string> cells) {
            bool first = true;
            for (const std::string &c : cells)
            {
                if (!first)
                    out += sep;
                out += c;
                first = false;
            }
            out += '\n';
        };

        bool fencing_header = false, milling_header = false;
        for (const MetricsReport *r : order)
        {
            char size[32];
            std::snprintf (size, sizeof size, " %gm", r->shape_size);
            const std::string setting = r->mode + " " + r->shape + size;
            const std::string n = std::to_string (r->n_agents);
            if (r->family == BehaviorFamily::fencing)
            {
                if (!fencing_header)
                {
                    row ({"setting", "agents", "fx_N", "MRE_m", "MPE_m", "ART_s"});
                    fencing_header = true;
                }
                const auto &f = r->fencing;
                row ({setting, n, detail::fixed3 (r->fx), detail::fixed3 (f ? std::optional (f->mre) : std::nullopt),
                      detail::fixed3 (f ? std::optional (f->mpe) : std::nullopt), detail::fixed3 (f ? f->art : std::nullopt)});
            }
            else
            {
                if (!milling_header)
                {
                    row ({"setting", "agents", "fx_N", "MRE_m", "sigma_m", "mu_m"});
                    milling_header = true;
                }
                const auto &m = r->milling;
                row ({setting, n, detail::fixed3 (r->fx), detail::fixed3 (m ? std::optional (m->mre) : std::nullopt),
                      detail::fixed3 (m ? std::optional (m->precision) : std::nullopt),
                      detail::fixed3 (m ? std::optional (m->accuracy) : std::nullopt)});
            }
        }
        return out;
    }

} // namespace fencemill
