// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Simulation-heavy criteria run their seeds on the worker pool.

#include <fencemill.hpp>

#include "../oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace fencemill;

namespace
{
    constexpr int kSeeds = 8;

    int failures = 0;

    void verdict (int id, bool ok, const std::string &what, const std::string &detail)
    {
        std::printf ("C%-2d %s  %s | %s\n", id, ok ? "PASS" : "FAIL", what.c_str (), detail.c_str ());
        std::fflush (stdout);
        if (!ok)
            ++failures;
    }

    std::string fmt (const char *f, auto... args)
    {
        char buf[512];
        std::snprintf (buf, sizeof buf, f, args...);
        return buf;
    }

    bool within (double v, double lo, double hi) { return v >= lo && v <= hi; }

    const SettingResult &setting (const CampaignResult &c, BehaviorMode mode, double size, int agents)
    {
        for (const SettingResult &s : c.settings)
            if (s.setting.config.behavior.mode == mode && s.pooled.shape_size == size && s.pooled.n_agents == agents &&
                s.setting.config.shape ().kind () == ShapeKind::circle)
                return s;
        throw std::logic_error ("missing campaign setting");
    }

    const SettingResult &shaped (const CampaignResult &c, const std::string &shape)
    {
        for (const SettingResult &s : c.settings)
            if (s.pooled.shape == shape && s.pooled.n_agents == 3)
                return s;
        throw std::logic_error ("missing campaign setting");
    }

    double seconds_of (const std::function<void ()> &f)
    {
        const auto t0 = std::chrono::steady_clock::now ();
        f ();
        return std::chrono::duration<double> (std::chrono::steady_clock::now () - t0).count ();
    }

    double path_length (const Trajectory &t)
    {
        double s = 0.0;
        for (std::size_t i = 1; i < t.samples.size (); ++i)
            s += std::hypot (t.samples[i].x - t.samples[i - 1].x, t.samples[i].y - t.samples[i - 1].y);
        return s;
    }

    /// Runs `cfg` under seeds 1..kSeeds and evaluates each run.
    std::vector<MetricsReport> seeds_of (const ScenarioConfig &cfg)
    {
        std::vector<MetricsReport> out (kSeeds);
        std::vector<std::function<void ()>> jobs;
        for (int s = 0; s < kSeeds; ++s)
            jobs.push_back ([&, s] {
                ScenarioConfig c = cfg;
                c.seed = static_cast<std::uint64_t> (s + 1);
                out[static_cast<std::size_t> (s)] = evaluate (run (c));
            });
        run_pool (jobs);
        return out;
    }

    void fencing_criteria (const CampaignResult &fencing)
    {
        const FencingMetrics *heb[4] = {};
        for (int n = 1; n <= 3; ++n)
        {
            const auto &f = setting (fencing, BehaviorMode::heb_fence, 30.0, n).pooled.fencing;
            heb[n] = f ? &*f : nullptr;
        }
        bool ok = heb[1] && heb[2] && heb[3] && heb[1]->art && heb[2]->art && heb[3]->art;
        std::string detail = "no dips";
        if (ok)
        {
            const bool band = within (heb[1]->mre, 0.7, 3.0);
            const bool mono = heb[1]->mre <= heb[2]->mre && heb[2]->mre <= heb[3]->mre && heb[1]->mpe <= heb[2]->mpe &&
                              heb[2]->mpe <= heb[3]->mpe && *heb[1]->art <= *heb[2]->art && *heb[2]->art <= *heb[3]->art;

            double slowest = 0.0;
            for (int n = 1; n <= 3; ++n)
            {
                ScenarioConfig c = setting (fencing, BehaviorMode::heb_fence, 30.0, n).setting.config;
                slowest = std::max (slowest, seconds_of ([&] { (void) evaluate (run (c)); }));
            }
            ok = band && mono && slowest < 5.0;
            detail = fmt ("MRE %.3f/%.3f/%.3f m, MPE %.3f/%.3f/%.3f m, ART %.2f/%.2f/%.2f s (n=1/2/3, %d seeds); slowest run %.2f s", heb[1]->mre,
                          heb[2]->mre, heb[3]->mre, heb[1]->mpe, heb[2]->mpe, heb[3]->mpe, *heb[1]->art, *heb[2]->art, *heb[3]->art, kSeeds, slowest);
        }
        verdict (1, ok, "HEB fencing, 30 m circle: 1-agent MRE in [0.7, 3] m, MRE/MPE/ART non-decreasing with agents, run < 5 s", detail);

        const auto &rvb = setting (fencing, BehaviorMode::rvb_fence, 30.0, 3).pooled.fencing;
        ok = rvb && rvb->art && heb[3] && heb[3]->art;
        detail = "no dips";
        if (ok)
        {
            const double mre_ratio = rvb->mre / heb[3]->mre;
            const double art_ratio = *rvb->art / *heb[3]->art;
            ok = within (mre_ratio, 1.5, 3.0) && within (art_ratio, 1.5, 3.0);
            detail = fmt ("3 agents: RVB MRE %.3f m vs HEB %.3f m (ratio %.3f), RVB ART %.2f s vs HEB %.2f s (ratio %.3f)", rvb->mre, heb[3]->mre, mre_ratio,
                          *rvb->art, *heb[3]->art, art_ratio);
        }
        verdict (2, ok, "RVB/HEB fencing ratios of MRE and ART in [1.5, 3]", detail);
    }

    void milling_criteria (const CampaignResult &heb, const CampaignResult &rvb)
    {
        bool ok = true;
        std::string detail;
        for (int n = 1; n <= 3; ++n)
        {
            const auto &m = setting (heb, BehaviorMode::heb_mill, 30.0, n).pooled.milling;
            const bool good = m && std::abs (m->accuracy) <= 0.5 && m->precision <= 0.25 && m->settle_time && within (*m->settle_time, 85.0, 340.0);
            ok = ok && good;
            if (m)
                detail += fmt ("n=%d mean error %+.3f m, precision %.3f m, settle %.1f s; ", n, m->accuracy, m->precision, m->settle_time.value_or (-1.0));
        }
        const auto &circle = setting (heb, BehaviorMode::heb_mill, 30.0, 3).pooled.milling;
        const auto &square = shaped (heb, "square").pooled.milling;
        const auto &star = shaped (heb, "star").pooled.milling;
        const bool order = circle && square && star && star->mre > square->mre && square->mre > circle->mre;
        if (circle && square && star)
            detail += fmt ("MRE star %.3f > square %.3f > circle %.3f m", star->mre, square->mre, circle->mre);
        verdict (3, ok && order, "HEB milling, 30 m circle: |mean error| <= 0.5 m, precision <= 0.25 m, settle in [85, 340] s, MRE star > square > circle",
                 detail);

        const auto &small = setting (rvb, BehaviorMode::rvb_mill, 2.0, 3).pooled.milling;
        ok = small && within (small->accuracy, 0.6, 1.8) && within (small->mre, 2.0, 4.5);
        verdict (4, ok, "RVB milling, 2 m circle, 3 agents: mean error in [0.6, 1.8] m, MRE in [2, 4.5] m",
                 small ? fmt ("mean error %+.3f m, MRE %.3f m, mean radius %.3f m", small->accuracy, small->mre, small->r_mean) : "no samples");
    }

    void estimator_criterion ()
    {
        std::mt19937_64 rng (2024);
        std::uniform_real_distribution<double> angle (-oracle::pi, oracle::pi), speed (0.1, 0.5);
        std::vector<std::vector<oracle::Pair>> windows;
        std::vector<double> truth;
        std::vector<double> fitted;
        double worst_truth = 0.0;
        while (windows.size () < 100)
        {
            const double theta = angle (rng), u = speed (rng);
            std::vector<EstimatorEntry> w;
            std::vector<oracle::Pair> pairs;
            for (int i = 0; i < 5; ++i)
            {
                const double psi = angle (rng);
                const double ur = oracle::synth_rate (theta, u, psi);
                w.push_back ({ur, psi, static_cast<double> (i)});
                pairs.push_back ({ur, psi});
            }
            const ThetaEstimate est = estimate_theta (w);
            if (!est.valid)
                continue;
            worst_truth = std::max (worst_truth, std::abs (oracle::wrap (est.theta - theta)));
            windows.push_back (pairs);
            fitted.push_back (est.theta);
        }
        std::vector<double> brute (windows.size ());
        std::vector<std::function<void ()>> jobs;
        for (std::size_t i = 0; i < windows.size (); ++i)
            jobs.push_back ([&, i] { brute[i] = oracle::grid_theta (windows[i]); });
        run_pool (jobs);
        double worst_grid = 0.0;
        for (std::size_t i = 0; i < windows.size (); ++i)
            worst_grid = std::max (worst_grid, std::abs (oracle::wrap (fitted[i] - brute[i])));

        int flagged = 0;
        for (int k = 0; k < 100; ++k)
        {
            const double psi = angle (rng), theta = angle (rng), u = speed (rng);
            std::vector<EstimatorEntry> w;
            for (int i = 0; i < 5; ++i)
            {
                const double h = oracle::wrap (psi + (k % 2 == 1 && i % 2 == 1 ? oracle::pi : 0.0));
                w.push_back ({oracle::synth_rate (theta, u, h), h, static_cast<double> (i)});
            }
            flagged += estimate_theta (w).valid ? 0 : 1;
        }
        const bool ok = worst_grid <= 1e-6 && worst_truth <= 1e-9 && flagged == 100;
        verdict (5, ok, "Estimator vs 0.001 deg grid brute force (<= 1e-6 rad), vs generating bearing (<= 1e-9 rad), constant heading invalid",
                 fmt ("100 windows: worst grid gap %.2e rad, worst truth gap %.2e rad; %d/100 constant-heading windows invalid", worst_grid, worst_truth,
                      flagged));
    }

    void dynamics_criterion ()
    {
        const DynamicsParams p;
        AgentState s;
        s.fx = 0.5;
        for (int i = 0; i < static_cast<int> (200.0 / p.dt); ++i)
            s = step (s, p);
        const double expected = oracle::positive_root (4.04, 0.1, 0.5);

        ScenarioConfig c;
        c.duration = 1000.0;
        const double coarse = path_length (run (c).agents[0].trajectory);
        c.dynamics.dt = p.dt / 2.0;
        const double fine = path_length (run (c).agents[0].trajectory);
        const double change = std::abs (fine - coarse) / coarse;

        const bool ok = std::abs (s.u - expected) <= 1e-3 && std::abs (expected - 0.3397) <= 1e-4 && change < 0.01;
        verdict (6, ok, "Terminal surge speed at 0.5 N within 1e-3 m/s of the quadratic root, dt halving moves 1000 s path length < 1%",
                 fmt ("simulated %.6f m/s, root %.6f m/s; path %.2f m at dt %.3f s, %.2f m at dt %.3f s (%.3f%%)", s.u, expected, coarse, p.dt, fine,
                      p.dt / 2.0, 100.0 * change));
    }

    void shapes_criterion ()
    {
        const ShapeSpec square = ShapeSpec::square (60.0);
        const ShapeSpec star = ShapeSpec::isotoxal_star (30.0, 10.0);
        std::mt19937_64 rng (7);
        std::uniform_real_distribution<double> angle (-oracle::pi, oracle::pi);
        double worst_square = 0.0, worst_star = 0.0;
        int sampled = 0;
        while (sampled < 10000)
        {
            const double th = angle (rng);
            const double quarter = std::remainder (th, oracle::pi / 4.0);
            if (std::abs (quarter) < 1e-6)
                continue;
            worst_square = std::max (worst_square, std::abs (square.radius_at (th) - oracle::square_radius (60.0, th)));
            worst_star = std::max (worst_star, std::abs (star.radius_at (th) - oracle::star_radius (60.0, 2.0, th)));
            ++sampled;
        }
        verdict (7, worst_square <= 1e-6 && worst_star <= 1e-6, "Ray-polygon radius vs closed forms for square and star within 1e-6 m",
                 fmt ("10000 angles: worst square gap %.2e m, worst star gap %.2e m", worst_square, worst_star));
    }

    void channel_criterion ()
    {
        bool linear = true;
        for (TimingMode mode : {TimingMode::simple, TimingMode::protocol})
            for (int n = 1; n <= 6; ++n)
            {
                ScenarioConfig c;
                c.n_agents = n;
                c.duration = 120.0;
                c.channel.timing_mode = mode;
                const RunLog log = run (c);
                const double expected = static_cast<double> (n) * range_update_period (c.channel, 1);
                linear = linear && range_update_period (c.channel, n) == expected;
                for (const AgentLog &a : log.agents)
                {
                    linear = linear && a.ranges.size () >= 2;
                    for (std::size_t i = 1; i < a.ranges.size (); ++i)
                        linear = linear && std::abs (a.ranges[i].t_recv - a.ranges[i - 1].t_recv - expected) < 1e-9;
                }
            }

        ScenarioConfig lossy;
        lossy.name = "fencing_lossy";
        lossy.channel.slot_time = 1.6;
        lossy.channel.loss_prob = 0.272;
        const double nominal = 1.0 / range_update_period (lossy.channel, 1);

        std::vector<RunLog> logs (kSeeds);
        std::vector<std::function<void ()>> jobs;
        for (int s = 0; s < kSeeds; ++s)
            jobs.push_back ([&, s] {
                ScenarioConfig c = lossy;
                c.seed = static_cast<std::uint64_t> (s + 1);
                logs[static_cast<std::size_t> (s)] = run (c);
            });
        run_pool (jobs);

        double delivered = 0.0, longest = 0.0;
        std::size_t dips = 0;
        bool returned = true;
        for (const RunLog &log : logs)
        {
            delivered += static_cast<double> (log.agents[0].ranges.size ()) / log.config.duration;
            for (const Dip &d : evaluate (log).dips)
            {
                ++dips;
                longest = std::max (longest, d.return_time);
                returned = returned && d.return_time <= 120.0;
            }
        }
        delivered /= kSeeds;
        const bool ok = linear && returned && dips > 0 && std::abs (delivered - 0.455) < 0.02 && std::abs (nominal - 0.625) < 1e-12;
        verdict (8, ok, "Per-agent range period linear in agents; lossy link (0.625 Hz nominal, 0.455 Hz delivered) fencing returns within 120 s",
                 fmt ("period n*T exact for n=1..6 in both timing modes: %s; delivered %.3f Hz of %.3f Hz; %zu dips over %d seeds, longest %.1f s",
                      linear ? "yes" : "no", delivered, nominal, dips, kSeeds, longest));
    }

    void flow_criterion ()
    {
        ScenarioConfig c;
        c.name = "fencing_flow";
        c.flow = {0.08, 0.0};
        c.behavior.shape = ShapeSpec::circle (1.5);
        c.behavior.fx = 1.0;
        const double speed = terminal_surge_speed (c.dynamics, c.behavior.fx);

        const std::vector<MetricsReport> runs = seeds_of (c);
        double worst = 0.0;
        bool confined = true;
        for (const MetricsReport &r : runs)
        {
            confined = confined && r.fencing.has_value ();
            if (r.fencing)
                worst = std::max (worst, r.fencing->mre);
        }
        const MetricsReport pooled = pool_reports (runs);
        const bool downstream = pooled.overshoot_centroid && pooled.overshoot_centroid->x > 0.0;
        const bool ok = confined && worst <= 5.0 && downstream && speed >= 3.0 * 0.08;
        verdict (9, ok, "Fencing in a 0.08 m/s current, 1.5 m circle: MRE <= 5 m, overshoots biased downstream",
                 fmt ("terminal speed %.3f m/s; worst MRE %.3f m over %d seeds; mean overshoot position (%+.3f, %+.3f) m", speed, worst, kSeeds,
                      pooled.overshoot_centroid ? pooled.overshoot_centroid->x : 0.0, pooled.overshoot_centroid ? pooled.overshoot_centroid->y : 0.0));
    }

    void determinism_criterion ()
    {
        std::vector<ScenarioConfig> configs;
        {
            ScenarioConfig c;
            c.n_agents = 3;
            c.duration = 400.0;
            c.channel.loss_prob = 0.2;
            c.channel.range_noise_std = 0.05;
            configs.push_back (c);
        }
        {
            ScenarioConfig c;
            c.n_agents = 2;
            c.duration = 400.0;
            c.behavior.mode = BehaviorMode::heb_mill;
            c.behavior.shape = ShapeSpec::isotoxal_star (30.0, 10.0);
            c.channel.timing_mode = TimingMode::protocol;
            c.channel.rate_source = RateSource::doppler;
            c.channel.doppler_noise_std = 0.01;
            c.flow = {0.02, -0.01};
            configs.push_back (c);
        }
        {
            ScenarioConfig c;
            c.n_agents = 3;
            c.duration = 400.0;
            c.behavior.mode = BehaviorMode::rvb_mill;
            c.behavior.shape = ShapeSpec::circle (2.0);
            c.initial.spawn_fraction = 0.1;
            configs.push_back (c);
        }
        {
            ScenarioConfig c;
            c.n_agents = 2;
            c.duration = 400.0;
            c.behavior.mode = BehaviorMode::rvb_fence;
            c.channel.ranging_increment = 0.047;
            configs.push_back (c);
        }

        std::vector<int> same (configs.size ()), exact (configs.size ());
        std::vector<std::function<void ()>> jobs;
        for (std::size_t i = 0; i < configs.size (); ++i)
            jobs.push_back ([&, i] {
                const RunLog a = run (configs[i]);
                const RunLog b = run (configs[i]);
                same[i] = a.agents == b.agents;
                exact[i] = replay (a).exact ();
            });
        run_pool (jobs);
        int n_same = 0, n_exact = 0;
        for (std::size_t i = 0; i < configs.size (); ++i)
        {
            n_same += same[i];
            n_exact += exact[i];
        }
        const int total = static_cast<int> (configs.size ());
        verdict (10, n_same == total && n_exact == total, "Identical seeds give bit-identical logs; replay is exact",
                 fmt ("%d/%d scenarios identical on re-run, %d/%d replays exact", n_same, total, n_exact, total));
    }
}

int main ()
{
    try
    {
        const CampaignResult fencing = run_campaign ("fencing_rvb", kSeeds);
        fencing_criteria (fencing);
        const CampaignResult heb_mill = run_campaign ("milling_heb", kSeeds);
        const CampaignResult rvb_mill = run_campaign ("milling_rvb", kSeeds);
        milling_criteria (heb_mill, rvb_mill);
        estimator_criterion ();
        dynamics_criterion ();
        shapes_criterion ();
        channel_criterion ();
        flow_criterion ();
        determinism_criterion ();
    }
    catch (const std::exception &e)
    {
        std::printf ("acceptance aborted: %s\n", e.what ());
        return 2;
    }
    std::printf ("%d criterion/criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
