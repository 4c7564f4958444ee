#pragma once
/**
 * @file   runlog.hpp
 * @brief  Run logs on disk: a directory of CSV streams plus a manifest.
 *
 *     manifest.json                format tag, scenario name, file list
 *     config.yaml                  full configuration snapshot
 *     agent_<i>_trajectory.csv     t,x,y,r,theta,psi
 *     agent_<i>_ranges.csv         t_meas,t_recv,r,u_r,source
 *     agent_<i>_rates.csv          t,u_r
 *     agent_<i>_commands.csv       t,psi_cmd,fx,reason
 *
 * Numbers use shortest round-trip formatting, so a saved log reloads to
 * bit-identical values and can be replayed exactly. Angles are radians.
 */

#include "../scenario.hpp"
#include "config.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fencemill::io
{
    inline constexpr const char *kGeneratorVersion = "fencemill 1.0.0";

    class RunLogError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    namespace detail
    {
        namespace fs = std::filesystem;

        [[nodiscard]] inline std::string agent_file (int i, const char *stream)
        {
            return "agent_" + std::to_string (i) + "_" + stream + ".csv";
        }

        inline void write_text (const fs::path &path, const std::string &text)
        {
            std::ofstream out (path, std::ios::binary);
            if (!out)
                throw RunLogError ("cannot write " + path.string ());
            out << text;
            if (!out)
                throw RunLogError ("error writing " + path.string ());
        }

        [[nodiscard]] inline std::string read_text (const fs::path &path)
        {
            std::ifstream in (path, std::ios::binary);
            if (!in)
                throw RunLogError ("cannot open " + path.string ());
            std::ostringstream ss;
            ss << in.rdbuf ();
            return ss.str ();
        }

        [[nodiscard]] inline std::vector<std::string_view> split (std::string_view line)
        {
            std::vector<std::string_view> out;
            std::size_t from = 0;
            for (;;)
            {
                const std::size_t at = line.find (',', from);
                out.push_back (line.substr (from, at == std::string_view::npos ? std::string_view::npos : at - from));
                if (at == std::string_view::npos)
                    return out;
                from = at + 1;
            }
        }

        /// Iterates data rows of a CSV file, checking the header and the
        /// column count, and reporting errors as file:line.
        class CsvReader
        {
        public:
            CsvReader (const fs::path &path, std::string_view header)
                : name_ (path.filename ().string ()), text_ (read_text (path))
            {
                std::string_view first = next_line ();
                if (first != header)
                    fail ("expected header '" + std::string (header) + "'");
                columns_ = split (header).size ();
            }

            /// Fields of the next row, or empty at end of file.
            [[nodiscard]] std::vector<std::string_view> row ()
            {
                while (pos_ < text_.size ())
                {
                    std::string_view line = next_line ();
                    if (line.empty ())
                        continue;
                    auto fields = split (line);
                    if (fields.size () != columns_)
                        fail ("expected " + std::to_string (columns_) + " fields, found " + std::to_string (fields.size ()));
                    return fields;
                }
                return {};
            }

            [[nodiscard]] double number (std::string_view field) const
            {
                double v = 0.0;
                const auto res = std::from_chars (field.data (), field.data () + field.size (), v);
                if (field.empty () || res.ec != std::errc () || res.ptr != field.data () + field.size ())
                    fail ("not a number: '" + std::string (field) + "'");
                return v;
            }

            [[noreturn]] void fail (const std::string &message) const
            {
                throw RunLogError (name_ + ":" + std::to_string (line_) + ": " + message);
            }

        private:
            std::string_view next_line ()
            {
                const std::string_view all (text_);
                std::size_t end = all.find ('\n', pos_);
                if (end == std::string_view::npos)
                    end = all.size ();
                std::string_view line = all.substr (pos_, end - pos_);
                if (!line.empty () && line.back () == '\r')
                    line.remove_suffix (1);
                pos_ = end + 1;
                ++line_;
                return line;
            }

            std::string name_;
            std::string text_;
            std::size_t pos_ = 0;
            std::size_t line_ = 0;
            std::size_t columns_ = 0;
        };

        [[nodiscard]] inline CommandReason parse_reason (const CsvReader &csv, std::string_view s)
        {
            for (int i = 0; i <= static_cast<int> (CommandReason::rate_tick); ++i)
                if (to_string (static_cast<CommandReason> (i)) == s)
                    return static_cast<CommandReason> (i);
            csv.fail ("unknown command reason '" + std::string (s) + "'");
        }
    } // namespace detail

    /// Writes `log` into `dir`, creating it if needed.
    inline void save_runlog (const RunLog &log, const std::filesystem::path &dir)
    {
        namespace fs = std::filesystem;
        using detail::agent_file;
        fs::create_directories (dir);

        nlohmann::json files = nlohmann::json::array ({"config.yaml"});
        const auto num = format_number;

        for (std::size_t k = 0; k < log.agents.size (); ++k)
        {
            const int i = static_cast<int> (k);
            const AgentLog &a = log.agents[k];

            std::string t = "t,x,y,r,theta,psi\n";
            for (const TrajectorySample &s : a.trajectory.samples)
                t += num (s.t) + "," + num (s.x) + "," + num (s.y) + "," + num (s.r) + "," + num (s.theta) + "," + num (s.psi) + "\n";
            detail::write_text (dir / agent_file (i, "trajectory"), t);

            std::string r = "t_meas,t_recv,r,u_r,source\n";
            for (const RangeSample &s : a.ranges)
                r += num (s.t_meas) + "," + num (s.t_recv) + "," + num (s.r) + "," + (s.u_r ? num (*s.u_r) : std::string ()) + "," +
                     std::string (to_string (s.source)) + "\n";
            detail::write_text (dir / agent_file (i, "ranges"), r);

            std::string u = "t,u_r\n";
            for (const RateSample &s : a.rates)
                u += num (s.t) + "," + num (s.u_r) + "\n";
            detail::write_text (dir / agent_file (i, "rates"), u);

            std::string c = "t,psi_cmd,fx,reason\n";
            for (const CommandEvent &e : a.commands)
                c += num (e.t) + "," + num (e.psi_cmd) + "," + num (e.fx) + "," + std::string (to_string (e.reason)) + "\n";
            detail::write_text (dir / agent_file (i, "commands"), c);

            for (const char *stream : {"trajectory", "ranges", "rates", "commands"})
                files.push_back (agent_file (i, stream));
        }

        detail::write_text (dir / "config.yaml", emit_config (log.config));

        const nlohmann::json manifest = {{"format", log.version},
                                         {"generator", kGeneratorVersion},
                                         {"scenario", log.config.name},
                                         {"n_agents", log.agents.size ()},
                                         {"files", files}};
        detail::write_text (dir / "manifest.json", manifest.dump (2) + "\n");
    }

    [[nodiscard]] inline RunLog load_runlog (const std::filesystem::path &dir)
    {
        using detail::agent_file;
        using detail::CsvReader;

        RunLog log;
        nlohmann::json manifest;
        try
        {
            manifest = nlohmann::json::parse (detail::read_text (dir / "manifest.json"));
            log.version = manifest.at ("format").get<std::string> ();
        }
        catch (const nlohmann::json::exception &e)
        {
            throw RunLogError ("manifest.json: " + std::string (e.what ()));
        }

        log.config = load_config (dir / "config.yaml");
        const int n = log.config.n_agents;
        log.agents.resize (static_cast<std::size_t> (n));

        for (int i = 0; i < n; ++i)
        {
            AgentLog &a = log.agents[static_cast<std::size_t> (i)];
            a.trajectory.agent_id = i;

            CsvReader t (dir / agent_file (i, "trajectory"), "t,x,y,r,theta,psi");
            for (auto f = t.row (); !f.empty (); f = t.row ())
                a.trajectory.samples.push_back ({t.number (f[0]), t.number (f[1]), t.number (f[2]), t.number (f[3]), t.number (f[4]), t.number (f[5])});

            CsvReader r (dir / agent_file (i, "ranges"), "t_meas,t_recv,r,u_r,source");
            for (auto f = r.row (); !f.empty (); f = r.row ())
            {
                RangeSample s;
                s.agent_id = i;
                s.t_meas = r.number (f[0]);
                s.t_recv = r.number (f[1]);
                s.r = r.number (f[2]);
                if (!f[3].empty ())
                    s.u_r = r.number (f[3]);
                if (f[4] == "doppler")
                    s.source = RateSource::doppler;
                else if (f[4] == "consecutive")
                    s.source = RateSource::consecutive;
                else
                    r.fail ("unknown rate source '" + std::string (f[4]) + "'");
                a.ranges.push_back (s);
            }

            CsvReader u (dir / agent_file (i, "rates"), "t,u_r");
            for (auto f = u.row (); !f.empty (); f = u.row ())
                a.rates.push_back ({i, u.number (f[0]), u.number (f[1])});

            CsvReader c (dir / agent_file (i, "commands"), "t,psi_cmd,fx,reason");
            for (auto f = c.row (); !f.empty (); f = c.row ())
                a.commands.push_back ({c.number (f[0]), c.number (f[1]), c.number (f[2]), detail::parse_reason (c, f[3])});
        }
        return log;
    }

} // namespace fencemill::io
