// fencemill command-line front end: run, metrics, campaign, replay.
//
// Exit status: 0 ok, 1 domain error (bad config, corrupt log, replay
// divergence), 2 usage error. Output directories default to
// $FENCEMILL_OUT, or ./runs when unset.

#include <fencemill/campaign.hpp>
#include <fencemill/io/config.hpp>
#include <fencemill/io/report_json.hpp>
#include <fencemill/io/runlog.hpp>
#include <fencemill/replay.hpp>
#include <fencemill/report.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fencemill;

namespace
{
    constexpr int kOk = 0;
    constexpr int kDomainError = 1;
    constexpr int kUsageError = 2;

    fs::path output_root ()
    {
        if (const char *env = std::getenv ("FENCEMILL_OUT"); env && *env)
            return env;
        return "runs";
    }

    void write_file (const fs::path &path, const std::string &text)
    {
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw io::RunLogError ("cannot write " + path.string ());
        out << text;
    }

    std::string summary (const MetricsReport &r)
    {
        std::string s = r.scenario + ": " + r.mode + " on " + r.shape + ", " + std::to_string (r.n_agents) + " agent(s)\n";
        char buf[256];
        if (r.family == BehaviorFamily::fencing)
        {
            if (r.fencing)
            {
                std::snprintf (buf, sizeof buf, "  dips %zu (complete %zu)  MRE %.3f m  MPE %.3f m  ART %s s\n", r.fencing->dips,
                               r.fencing->complete_dips, r.fencing->mre, r.fencing->mpe, detail::fixed3 (r.fencing->art).c_str ());
                s += buf;
            }
            else
                s += "  no boundary crossings\n";
        }
        else if (r.milling)
        {
            std::snprintf (buf, sizeof buf, "  MRE %.3f m  mean error %.3f m  precision %.3f m  settle %s s\n", r.milling->mre, r.milling->accuracy,
                           r.milling->precision, detail::fixed3 (r.milling->settle_time).c_str ());
            s += buf;
        }
        return s;
    }

    /// Tidy plot data for one run: agent,t,x,y,r,theta.
    std::string plot_data (const RunLog &log)
    {
        std::string s = "agent,t,x,y,r,theta\n";
        for (const AgentLog &a : log.agents)
            for (const TrajectorySample &p : a.trajectory.samples)
                s += std::to_string (a.trajectory.agent_id) + "," + io::format_number (p.t) + "," + io::format_number (p.x) + "," + io::format_number (p.y) + "," +
                     io::format_number (p.r) + "," + io::format_number (p.theta) + "\n";
        return s;
    }

    struct RunArgs
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<int> agents;
        std::optional<double> duration;
    };

    int cmd_run (const RunArgs &a)
    {
        ScenarioConfig cfg = io::load_config (a.config);
        if (a.seed)
            cfg.seed = *a.seed;
        if (a.agents)
            cfg.n_agents = *a.agents;
        if (a.duration)
            cfg.duration = *a.duration;
        cfg.validate ();

        const fs::path dir = a.out.empty () ? output_root () / cfg.name : fs::path (a.out);
        const RunLog log = run (cfg);
        io::save_runlog (log, dir);
        const MetricsReport rep = evaluate (log);
        write_file (dir / "metrics.json", io::to_json (rep).dump (2) + "\n");
        std::cout << summary (rep) << "  log written to " << dir.string () << "\n";
        return kOk;
    }

    struct MetricsArgs
    {
        std::vector<std::string> dirs;
        bool table = false;
        bool json = false;
        std::string source = "truth";
    };

    int cmd_metrics (const MetricsArgs &a)
    {
        const MetricSource source = a.source == "ranges" ? MetricSource::ranges : MetricSource::truth;
        std::vector<MetricsReport> reports;
        for (const std::string &d : a.dirs)
            reports.push_back (evaluate (io::load_runlog (d), source));

        if (a.json)
            std::cout << (reports.size () == 1 ? io::to_json (reports.front ()) : io::to_json (reports)).dump (2) << "\n";
        else if (a.table)
            std::cout << render_table (reports);
        else
            for (const MetricsReport &r : reports)
                std::cout << summary (r);
        return kOk;
    }

    struct CampaignArgs
    {
        std::string name;
        std::string out;
        int seeds = 8;
        unsigned workers = 0;
    };

    int cmd_campaign (const CampaignArgs &a)
    {
        const CampaignResult res = run_campaign (a.name, a.seeds, a.workers);
        const fs::path dir = a.out.empty () ? output_root () / ("campaign_" + a.name) : fs::path (a.out);
        fs::create_directories (dir);

        std::vector<MetricsReport> pooled;
        for (const SettingResult &s : res.settings)
        {
            pooled.push_back (s.pooled);
            write_file (dir / (s.setting.label + "_trajectory.csv"), plot_data (s.first_log));
        }
        const std::string table = render_table (pooled);
        write_file (dir / "summary.csv", table);
        write_file (dir / "summary.json", io::to_json (pooled).dump (2) + "\n");

        std::cout << "campaign " << res.name << ", " << res.seeds << " seed(s) per setting\n" << table;
        for (const std::string &n : res.notes)
            std::cout << n << "\n";
        std::cout << "output written to " << dir.string () << "\n";
        return kOk;
    }

    int cmd_replay (const std::string &dir)
    {
        const RunLog log = io::load_runlog (dir);
        const ReplayResult res = replay (log);
        if (!res.version_ok)
        {
            std::cerr << "replay: log format '" << res.logged_version << "' does not match this build ('" << kLogFormatVersion << "')\n";
            return kDomainError;
        }
        if (res.divergence)
        {
            std::cerr << "replay: " << describe (*res.divergence) << "\n";
            return kDomainError;
        }
        std::cout << "replay exact: " << log.agents.size () << " agent(s) reproduced\n";
        return kOk;
    }
} // namespace

int main (int argc, char **argv)
{
    CLI::App app {"fencemill: beacon-referenced fencing and milling swarm simulator"};
    app.require_subcommand (1);

    RunArgs run_args;
    auto *run_cmd = app.add_subcommand ("run", "Run a scenario and write its log and metrics");
    run_cmd->add_option ("config", run_args.config, "Scenario YAML file")->required ();
    run_cmd->add_option ("-o,--out", run_args.out, "Output directory (default $FENCEMILL_OUT/<name>)");
    run_cmd->add_option ("--seed", run_args.seed, "Override the seed");
    run_cmd->add_option ("--agents", run_args.agents, "Override the number of agents");
    run_cmd->add_option ("--duration", run_args.duration, "Override the duration, s");

    MetricsArgs metrics_args;
    auto *metrics_cmd = app.add_subcommand ("metrics", "Compute metrics of saved run logs");
    metrics_cmd->add_option ("logs", metrics_args.dirs, "Run log directories")->required ();
    metrics_cmd->add_flag ("--table", metrics_args.table, "Comparison-table rows");
    metrics_cmd->add_flag ("--json", metrics_args.json, "JSON report");
    metrics_cmd->add_option ("--source", metrics_args.source, "Position source: truth or ranges")->check (CLI::IsMember ({"truth", "ranges"}));

    CampaignArgs campaign_args;
    auto *campaign_cmd = app.add_subcommand ("campaign", "Run a named sweep: fencing_heb, fencing_rvb, milling_heb, milling_rvb");
    campaign_cmd->add_option ("name", campaign_args.name, "Campaign name")->required ();
    campaign_cmd->add_option ("-o,--out", campaign_args.out, "Output directory (default $FENCEMILL_OUT/campaign_<name>)");
    campaign_cmd->add_option ("--seeds", campaign_args.seeds, "Seeds per setting")->check (CLI::PositiveNumber);
    campaign_cmd->add_option ("--workers", campaign_args.workers, "Worker threads (0 = all cores)");

    std::string replay_dir;
    auto *replay_cmd = app.add_subcommand ("replay", "Re-run a saved log and check it reproduces exactly");
    replay_cmd->add_option ("log", replay_dir, "Run log directory")->required ();

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit (e);
        return code == 0 ? kOk : kUsageError;
    }

    try
    {
        if (*run_cmd)
            return cmd_run (run_args);
        if (*metrics_cmd)
            return cmd_metrics (metrics_args);
        if (*campaign_cmd)
        {
            try
            {
                (void) campaign_settings (campaign_args.name);
            }
            catch (const UnknownCampaign &e)
            {
                std::cerr << e.what () << "\n\n" << campaign_cmd->help ();
                return kUsageError;
            }
            return cmd_campaign (campaign_args);
        }
        if (*replay_cmd)
            return cmd_replay (replay_dir);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what () << "\n";
        return kDomainError;
    }
    return kUsageError;
}
