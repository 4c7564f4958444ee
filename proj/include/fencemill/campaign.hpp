#pragma once
/**
 * @file   campaign.hpp
 * @brief  Named simulation sweeps and a worker pool to run them.
 *
 * Each setting is run over several seeds and its metrics pooled: fencing
 * pools the dips of every seed, milling aggregates per-agent results across
 * seeds. The log of the first seed is kept for plotting.
 */

#include "report.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fencemill
{
    class UnknownCampaign : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Runs `jobs` on up to `workers` threads (0 = hardware concurrency).
    /// Each job is independent; the first exception is rethrown afterwards.
    inline void run_pool (std::vector<std::function<void ()>> &jobs, unsigned workers = 0)
    {
        if (workers == 0)
            workers = std::max (1u, std::thread::hardware_concurrency ());
        workers = std::min<unsigned> (workers, static_cast<unsigned> (std::max<std::size_t> (1, jobs.size ())));

        std::atomic<std::size_t> next {0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < jobs.size (); i = next++)
            {
                try
                {
                    jobs[i] ();
                }
                catch (...)
                {
                    std::lock_guard lock (failure_mutex);
                    if (!failure)
                        failure = std::current_exception ();
                }
            }
        };
        std::vector<std::thread> threads;
        for (unsigned w = 1; w < workers; ++w)
            threads.emplace_back (worker);
        worker ();
        for (std::thread &t : threads)
            t.join ();
        if (failure)
            std::rethrow_exception (failure);
    }

    /// Merges reports of the same setting run under different seeds.
    [[nodiscard]] inline MetricsReport pool_reports (std::span<const MetricsReport> runs)
    {
        if (runs.empty ())
            throw std::invalid_argument ("pool_reports: no runs");
        MetricsReport out = runs.front ();
        out.dips.clear ();
        out.milling_per_agent.clear ();
        for (const MetricsReport &r : runs)
        {
            out.dips.insert (out.dips.end (), r.dips.begin (), r.dips.end ());
            out.milling_per_agent.insert (out.milling_per_agent.end (), r.milling_per_agent.begin (), r.milling_per_agent.end ());
        }
        if (out.family == BehaviorFamily::fencing)
        {
            out.fencing = fencing_metrics (out.dips);
            out.overshoot_centroid.reset ();
            if (!out.dips.empty ())
            {
                Vec2 sum;
                for (const Dip &d : out.dips)
                    sum = sum + d.centroid;
                out.overshoot_centroid = (1.0 / static_cast<double> (out.dips.size ())) * sum;
            }
        }
        else
            out.milling = aggregate_milling (out.milling_per_agent);
        return out;
    }

    struct CampaignSetting
    {
        std::string label;     ///< unique within the campaign, used for file names
        ScenarioConfig config; ///< seed is replaced per run
    };

    struct SettingResult
    {
        CampaignSetting setting;
        MetricsReport pooled;
        RunLog first_log; ///< log of the first seed
    };

    struct CampaignResult
    {
        std::string name;
        int seeds = 0;
        std::vector<SettingResult> settings;
        std::vector<std::string> notes; ///< derived comparisons, one line each
    };

    [[nodiscard]] inline const std::vector<std::string_view> &campaign_names ()
    {
        static const std::vector<std::string_view> names = {"fencing_heb", "fencing_rvb", "milling_heb", "milling_rvb"};
        return names;
    }

    namespace detail
    {
        [[nodiscard]] inline ScenarioConfig base_config (BehaviorMode mode, const ShapeSpec &shape, int agents)
        {
            ScenarioConfig c;
            c.n_agents = agents;
            c.duration = 1000.0;
            c.behavior.mode = mode;
            c.behavior.shape = shape;
            if (family_of (mode) == BehaviorFamily::milling)
            {
                c.behavior.gain_deg_per_m = 20.0;
                c.behavior.rate_gain_deg_per_s = 0.0;
                c.initial.spawn_fraction = 0.1;
                c.metrics_skip = 300.0;
            }
            return c;
        }

        [[nodiscard]] inline std::string shape_tag (const ShapeSpec &s)
        {
            if (s.kind () == ShapeKind::circle)
            {
                char buf[32];
                std::snprintf (buf, sizeof buf, "circle%g", s.radius ());
                return buf;
            }
            return s.label ();
        }

        inline void add (std::vector<CampaignSetting> &out, const std::string &campaign, BehaviorMode mode, const ShapeSpec &shape, int agents)
        {
            ScenarioConfig c = base_config (mode, shape, agents);
            const std::string label = std::string (to_string (mode)) + "_" + shape_tag (shape) + "_n" + std::to_string (agents);
            c.name = campaign + "/" + label;
            out.push_back ({label, c});
        }
    } // namespace detail

    /// Settings of a named campaign. Throws UnknownCampaign listing the valid names.
    [[nodiscard]] inline std::vector<CampaignSetting> campaign_settings (std::string_view name)
    {
        const std::string n (name);
        const ShapeSpec circle = ShapeSpec::circle (30.0);
        const ShapeSpec square = ShapeSpec::square (60.0);
        const ShapeSpec star = ShapeSpec::isotoxal_star (30.0, 10.0);
        std::vector<CampaignSetting> s;
        if (name == "fencing_heb")
        {
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::heb_fence, circle, k);
            detail::add (s, n, BehaviorMode::heb_fence, square, 3);
            detail::add (s, n, BehaviorMode::heb_fence, star, 3);
        }
        else if (name == "fencing_rvb")
        {
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::rvb_fence, circle, k);
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::heb_fence, circle, k);
        }
        else if (name == "milling_heb")
        {
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::heb_mill, circle, k);
            detail::add (s, n, BehaviorMode::heb_mill, square, 3);
            detail::add (s, n, BehaviorMode::heb_mill, star, 3);
        }
        else if (name == "milling_rvb")
        {
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::rvb_mill, circle, k);
            for (int k = 1; k <= 3; ++k)
                detail::add (s, n, BehaviorMode::rvb_mill, ShapeSpec::circle (2.0), k);
        }
        else
        {
            std::string valid;
            for (std::string_view v : campaign_names ())
                valid += (valid.empty () ? "" : ", ") + std::string (v);
            throw UnknownCampaign ("unknown campaign '" + n + "'; valid campaigns: " + valid);
        }
        return s;
    }

    namespace detail
    {
        [[nodiscard]] inline const SettingResult *find (const CampaignResult &r, BehaviorMode mode, std::string_view shape, int agents)
        {
            for (const SettingResult &s : r.settings)
                if (s.pooled.mode == to_string (mode) && s.pooled.shape == shape && s.pooled.n_agents == agents)
                    return &s;
            return nullptr;
        }

        [[nodiscard]] inline std::string ratio_note (const char *what, std::optional<double> num, std::optional<double> den, int agents)
        {
            char buf[160];
            if (num && den && *den > 0.0)
                std::snprintf (buf, sizeof buf, "RVB/HEB %s ratio, %d agents: %.3f", what, agents, *num / *den);
            else
                std::snprintf (buf, sizeof buf, "RVB/HEB %s ratio, %d agents: n/a", what, agents);
            return buf;
        }

        inline void add_notes (CampaignResult &r)
        {
            if (r.name == "fencing_rvb")
                for (int k = 1; k <= 3; ++k)
                {
                    const SettingResult *rvb = find (r, BehaviorMode::rvb_fence, "circle", k);
                    const SettingResult *heb = find (r, BehaviorMode::heb_fence, "circle", k);
                    if (!rvb || !heb || !rvb->pooled.fencing || !heb->pooled.fencing)
                        continue;
                    r.notes.push_back (ratio_note ("MRE", rvb->pooled.fencing->mre, heb->pooled.fencing->mre, k));
                    r.notes.push_back (ratio_note ("ART", rvb->pooled.fencing->art, heb->pooled.fencing->art, k));
                }
            if (r.name == "milling_heb" || r.name == "fencing_heb")
            {
                std::string order = "MRE by shape, 3 agents:";
                for (const SettingResult &s : r.settings)
                    if (s.pooled.n_agents == 3)
                    {
                        const double mre = s.pooled.milling ? s.pooled.milling->mre : (s.pooled.fencing ? s.pooled.fencing->mre : 0.0);
                        char buf[64];
                        std::snprintf (buf, sizeof buf, " %s %.3f", s.pooled.shape.c_str (), mre);
                        order += buf;
                    }
                r.notes.push_back (order);
            }
        }
    } // namespace detail

    /// Runs every setting of `name` under seeds 1..`seeds`.
    [[nodiscard]] inline CampaignResult run_campaign (std::string_view name, int seeds = 8, unsigned workers = 0)
    {
        if (seeds < 1)
            throw std::invalid_argument ("seeds must be at least 1");
        CampaignResult result;
        result.name = std::string (name);
        result.seeds = seeds;
        const std::vector<CampaignSetting> settings = campaign_settings (name);

        std::vector<std::vector<MetricsReport>> reports (settings.size (), std::vector<MetricsReport> (static_cast<std::size_t> (seeds)));
        std::vector<RunLog> first (settings.size ());
        std::vector<std::function<void ()>> jobs;
        for (std::size_t i = 0; i < settings.size (); ++i)
            for (int s = 0; s < seeds; ++s)
                jobs.push_back ([&, i, s] {
                    ScenarioConfig c = settings[i].config;
                    c.seed = static_cast<std::uint64_t> (s + 1);
                    RunLog log = run (c);
                    reports[i][static_cast<std::size_t> (s)] = evaluate (log);
                    if (s == 0)
                        first[i] = std::move (log);
                });
        run_pool (jobs, workers);

        for (std::size_t i = 0; i < settings.size (); ++i)
            result.settings.push_back ({settings[i], pool_reports (reports[i]), std::move (first[i])});
        detail::add_notes (result);
        return result;
    }

} // namespace fencemill
