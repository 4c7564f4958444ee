#pragma once
/**
 * @file   config.hpp
 * @brief  Scenario configuration files (YAML) with line-level diagnostics.
 *
 * Required keys are `n_agents`, `duration`, `shape` and `behavior.mode`;
 * everything else has a default. Unknown keys are rejected so that typos do
 * not silently fall back to defaults. Angles in files are degrees.
 *
 *     n_agents: 3
 *     duration: 1000
 *     shape: {type: circle, radius: 30}
 *     behavior: {mode: heb_fence, fx: 0.5}
 *
 * emit_config() writes every field explicitly with shortest round-trip
 * number formatting, so parse_config(emit_config(c)) reproduces `c` exactly.
 */

#include "../scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace fencemill::io
{
    /// Configuration error with the position of the offending node.
    class ConfigParseError : public ConfigError
    {
    public:
        ConfigParseError (const std::string &source, int line, int column, const std::string &message)
            : ConfigError (source + (line > 0 ? ":" + std::to_string (line) + ":" + std::to_string (column) : std::string ()) + ": " + message),
              line_ (line)
        {
        }

        /// 1-based line, 0 when unknown.
        [[nodiscard]] int line () const noexcept { return line_; }

    private:
        int line_;
    };

    [[nodiscard]] inline std::string format_number (double v)
    {
        char buf[64];
        const auto res = std::to_chars (buf, buf + sizeof buf, v);
        return std::string (buf, res.ptr);
    }

    [[nodiscard]] constexpr std::string_view to_string (RateSource s) noexcept { return s == RateSource::doppler ? "doppler" : "consecutive"; }
    [[nodiscard]] constexpr std::string_view to_string (TimingMode m) noexcept { return m == TimingMode::protocol ? "protocol" : "simple"; }
    [[nodiscard]] constexpr std::string_view to_string (HeadingPairing p) noexcept { return p == HeadingPairing::reception ? "reception" : "measurement"; }
    [[nodiscard]] constexpr std::string_view to_string (Rotation d) noexcept { return d == Rotation::cw ? "cw" : "ccw"; }

    namespace detail
    {
        class Reader
        {
        public:
            explicit Reader (std::string source) : source_ (std::move (source)) {}

            [[noreturn]] void fail (const YAML::Node &at, const std::string &message) const
            {
                const YAML::Mark m = at.Mark ();
                if (m.is_null ())
                    throw ConfigParseError (source_, 0, 0, message);
                throw ConfigParseError (source_, m.line + 1, m.column + 1, message);
            }

            void expect_map (const YAML::Node &node, const std::string &path) const
            {
                if (!node.IsMap ())
                    fail (node, "'" + path + "' must be a mapping");
            }

            void only_keys (const YAML::Node &map, const std::string &path, std::initializer_list<std::string_view> allowed) const
            {
                for (const auto &kv : map)
                {
                    const std::string key = kv.first.as<std::string> ();
                    bool ok = false;
                    for (std::string_view a : allowed)
                        ok = ok || key == a;
                    if (!ok)
                        fail (kv.first, "unknown key '" + join (path, key) + "'");
                }
            }

            [[nodiscard]] YAML::Node require (const YAML::Node &map, const std::string &path, const char *key) const
            {
                YAML::Node n = map[key];
                if (!n)
                    fail (map, "missing required key '" + join (path, key) + "'");
                return n;
            }

            [[nodiscard]] double number (const YAML::Node &n, const std::string &what) const
            {
                if (!n.IsScalar ())
                    fail (n, "'" + what + "' must be a number");
                double v = 0.0;
                const std::string &text = n.Scalar ();
                const auto res = std::from_chars (text.data (), text.data () + text.size (), v);
                if (res.ec != std::errc () || res.ptr != text.data () + text.size ())
                    fail (n, "'" + what + "' must be a number, got '" + text + "'");
                return v;
            }

            template <typename Int>
            [[nodiscard]] Int integer (const YAML::Node &n, const std::string &what) const
            {
                if (!n.IsScalar ())
                    fail (n, "'" + what + "' must be an integer");
                Int v {};
                const std::string &text = n.Scalar ();
                const auto res = std::from_chars (text.data (), text.data () + text.size (), v);
                if (res.ec != std::errc () || res.ptr != text.data () + text.size ())
                    fail (n, "'" + what + "' must be an integer, got '" + text + "'");
                return v;
            }

            [[nodiscard]] std::string text (const YAML::Node &n, const std::string &what) const
            {
                if (!n.IsScalar ())
                    fail (n, "'" + what + "' must be a string");
                return n.Scalar ();
            }

            void maybe_number (const YAML::Node &map, const std::string &path, const char *key, double &out) const
            {
                if (const YAML::Node n = map[key])
                    out = number (n, join (path, key));
            }

            [[nodiscard]] static std::string join (const std::string &path, std::string_view key)
            {
                return path.empty () ? std::string (key) : path + "." + std::string (key);
            }

        private:
            std::string source_;
        };

        template <typename E>
        struct Choice
        {
            std::string_view name;
            E value;
        };

        template <typename E, std::size_t N>
        [[nodiscard]] E choose (const Reader &rd, const YAML::Node &n, const std::string &what, const Choice<E> (&choices)[N])
        {
            const std::string s = rd.text (n, what);
            std::string valid;
            for (const auto &c : choices)
            {
                if (s == c.name)
                    return c.value;
                valid += (valid.empty () ? "" : ", ") + std::string (c.name);
            }
            rd.fail (n, "'" + what + "' must be one of " + valid + "; got '" + s + "'");
        }

        inline constexpr Choice<BehaviorMode> kModes[] = {{"rvb_fence", BehaviorMode::rvb_fence},
                                                          {"rvb_mill", BehaviorMode::rvb_mill},
                                                          {"heb_fence", BehaviorMode::heb_fence},
                                                          {"heb_mill", BehaviorMode::heb_mill}};

        [[nodiscard]] inline Rotation rotation (const Reader &rd, const YAML::Node &n, const std::string &what)
        {
            const std::string s = rd.text (n, what);
            if (s == "cw" || s == "+1" || s == "1")
                return Rotation::cw;
            if (s == "ccw" || s == "-1")
                return Rotation::ccw;
            rd.fail (n, "'" + what + "' must be cw, ccw, +1 or -1; got '" + s + "'");
        }

        [[nodiscard]] inline ShapeSpec parse_shape (const Reader &rd, const YAML::Node &n)
        {
            rd.expect_map (n, "shape");
            const std::string type = rd.text (rd.require (n, "shape", "type"), "shape.type");
            try
            {
                if (type == "circle")
                {
                    rd.only_keys (n, "shape", {"type", "radius"});
                    return ShapeSpec::circle (rd.number (rd.require (n, "shape", "radius"), "shape.radius"));
                }
                if (type == "square")
                {
                    rd.only_keys (n, "shape", {"type", "side"});
                    return ShapeSpec::square (rd.number (rd.require (n, "shape", "side"), "shape.side"));
                }
                if (type == "star")
                {
                    rd.only_keys (n, "shape", {"type", "outer", "inner"});
                    return ShapeSpec::isotoxal_star (rd.number (rd.require (n, "shape", "outer"), "shape.outer"),
                                                     rd.number (rd.require (n, "shape", "inner"), "shape.inner"));
                }
                if (type == "polygon")
                {
                    rd.only_keys (n, "shape", {"type", "vertices"});
                    const YAML::Node list = rd.require (n, "shape", "vertices");
                    if (!list.IsSequence ())
                        rd.fail (list, "'shape.vertices' must be a list of [x, y] pairs");
                    std::vector<Vec2> vertices;
                    for (const YAML::Node &v : list)
                    {
                        if (!v.IsSequence () || v.size () != 2)
                            rd.fail (v, "each polygon vertex must be [x, y]");
                        vertices.push_back ({rd.number (v[0], "shape.vertices"), rd.number (v[1], "shape.vertices")});
                    }
                    return ShapeSpec::polygon (std::move (vertices));
                }
            }
            catch (const ShapeError &e)
            {
                rd.fail (n, e.what ());
            }
            rd.fail (n["type"], "'shape.type' must be one of circle, square, star, polygon; got '" + type + "'");
        }

        inline void parse_behavior (const Reader &rd, const YAML::Node &n, BehaviorConfig &b)
        {
            rd.expect_map (n, "behavior");
            rd.only_keys (n, "behavior",
                          {"mode", "D", "k", "k_rate", "delta_psi", "window_len", "window_max_age", "heading_update_dt", "fx",
                           "min_conditioning", "max_correction", "pairing"});
            b.mode = choose (rd, rd.require (n, "behavior", "mode"), "behavior.mode", kModes);
            if (const YAML::Node d = n["D"])
                b.direction = rotation (rd, d, "behavior.D");
            rd.maybe_number (n, "behavior", "k", b.gain_deg_per_m);
            rd.maybe_number (n, "behavior", "k_rate", b.rate_gain_deg_per_s);
            rd.maybe_number (n, "behavior", "delta_psi", b.rotation_step_deg);
            if (const YAML::Node w = n["window_len"])
                b.window_len = rd.integer<int> (w, "behavior.window_len");
            rd.maybe_number (n, "behavior", "window_max_age", b.window_max_age);
            rd.maybe_number (n, "behavior", "heading_update_dt", b.heading_update_dt);
            rd.maybe_number (n, "behavior", "fx", b.fx);
            rd.maybe_number (n, "behavior", "min_conditioning", b.min_conditioning);
            rd.maybe_number (n, "behavior", "max_correction", b.max_correction_deg);
            if (const YAML::Node p = n["pairing"])
            {
                static constexpr Choice<HeadingPairing> kPairing[] = {{"reception", HeadingPairing::reception},
                                                                      {"measurement", HeadingPairing::measurement}};
                b.pairing = choose (rd, p, "behavior.pairing", kPairing);
            }
        }

        inline void parse_override (const Reader &rd, const YAML::Node &n, const std::string &path, AgentOverride &o)
        {
            rd.expect_map (n, path);
            rd.only_keys (n, path, {"mode", "D", "k", "k_rate", "delta_psi", "window_len", "fx"});
            if (const YAML::Node v = n["mode"])
                o.mode = choose (rd, v, path + ".mode", kModes);
            if (const YAML::Node v = n["D"])
                o.direction = rotation (rd, v, path + ".D");
            if (const YAML::Node v = n["k"])
                o.gain_deg_per_m = rd.number (v, path + ".k");
            if (const YAML::Node v = n["k_rate"])
                o.rate_gain_deg_per_s = rd.number (v, path + ".k_rate");
            if (const YAML::Node v = n["delta_psi"])
                o.rotation_step_deg = rd.number (v, path + ".delta_psi");
            if (const YAML::Node v = n["window_len"])
                o.window_len = rd.integer<int> (v, path + ".window_len");
            if (const YAML::Node v = n["fx"])
                o.fx = rd.number (v, path + ".fx");
        }

        inline void parse_dynamics (const Reader &rd, const YAML::Node &n, DynamicsParams &d)
        {
            rd.expect_map (n, "dynamics");
            rd.only_keys (n, "dynamics", {"x_u", "x_uu", "y_v", "y_vv", "mass", "heading_rate"});
            rd.maybe_number (n, "dynamics", "x_u", d.x_u);
            rd.maybe_number (n, "dynamics", "x_uu", d.x_uu);
            rd.maybe_number (n, "dynamics", "y_v", d.y_v);
            rd.maybe_number (n, "dynamics", "y_vv", d.y_vv);
            rd.maybe_number (n, "dynamics", "mass", d.mass);
            rd.maybe_number (n, "dynamics", "heading_rate", d.heading_rate_deg);
        }

        inline void parse_channel (const Reader &rd, const YAML::Node &n, ChannelConfig &c)
        {
            rd.expect_map (n, "channel");
            rd.only_keys (n, "channel",
                          {"slot_time", "loss_prob", "rate_source", "range_noise_std", "doppler_noise_std", "ranging_increment", "timing_mode",
                           "latency_slots"});
            rd.maybe_number (n, "channel", "slot_time", c.slot_time);
            rd.maybe_number (n, "channel", "loss_prob", c.loss_prob);
            if (const YAML::Node v = n["rate_source"])
            {
                static constexpr Choice<RateSource> kSources[] = {{"consecutive", RateSource::consecutive}, {"doppler", RateSource::doppler}};
                c.rate_source = choose (rd, v, "channel.rate_source", kSources);
            }
            rd.maybe_number (n, "channel", "range_noise_std", c.range_noise_std);
            rd.maybe_number (n, "channel", "doppler_noise_std", c.doppler_noise_std);
            rd.maybe_number (n, "channel", "ranging_increment", c.ranging_increment);
            if (const YAML::Node v = n["timing_mode"])
            {
                static constexpr Choice<TimingMode> kTiming[] = {{"simple", TimingMode::simple}, {"protocol", TimingMode::protocol}};
                c.timing_mode = choose (rd, v, "channel.timing_mode", kTiming);
            }
            if (const YAML::Node v = n["latency_slots"])
                c.latency_slots = rd.integer<int> (v, "channel.latency_slots");
        }

        inline void parse_initial (const Reader &rd, const YAML::Node &n, InitialPoses &p)
        {
            rd.expect_map (n, "initial_poses");
            rd.only_keys (n, "initial_poses", {"placement", "spawn_fraction", "poses"});
            if (const YAML::Node v = n["placement"])
            {
                static constexpr Choice<Placement> kPlacement[] = {{"random", Placement::random_inside}, {"explicit", Placement::explicit_poses}};
                p.placement = choose (rd, v, "initial_poses.placement", kPlacement);
            }
            rd.maybe_number (n, "initial_poses", "spawn_fraction", p.spawn_fraction);
            if (const YAML::Node list = n["poses"])
            {
                if (!list.IsSequence ())
                    rd.fail (list, "'initial_poses.poses' must be a list of [x, y, heading] triples");
                for (const YAML::Node &v : list)
                {
                    if (!v.IsSequence () || v.size () != 3)
                        rd.fail (v, "each pose must be [x, y, heading_deg]");
                    p.poses.push_back ({rd.number (v[0], "pose x"), rd.number (v[1], "pose y"), rd.number (v[2], "pose heading")});
                }
                if (!n["placement"])
                    p.placement = Placement::explicit_poses;
            }
        }
    } // namespace detail

    /// Parses a scenario from YAML text. `source` names the text in messages.
    [[nodiscard]] inline ScenarioConfig parse_config (const std::string &text, const std::string &source = "<config>")
    {
        detail::Reader rd (source);
        YAML::Node root;
        try
        {
            root = YAML::Load (text);
        }
        catch (const YAML::ParserException &e)
        {
            throw ConfigParseError (source, e.mark.line + 1, e.mark.column + 1, e.msg);
        }
        if (!root.IsMap ())
            throw ConfigParseError (source, 1, 1, "configuration must be a mapping");

        rd.only_keys (root, "",
                      {"name", "n_agents", "duration", "dt", "seed", "log_interval", "metrics_skip", "flow", "shape", "behavior", "agents",
                       "dynamics", "channel", "initial_poses"});

        ScenarioConfig cfg;
        if (const YAML::Node v = root["name"])
            cfg.name = rd.text (v, "name");
        cfg.n_agents = rd.integer<int> (rd.require (root, "", "n_agents"), "n_agents");
        cfg.duration = rd.number (rd.require (root, "", "duration"), "duration");
        rd.maybe_number (root, "", "dt", cfg.dynamics.dt);
        if (const YAML::Node v = root["seed"])
            cfg.seed = rd.integer<std::uint64_t> (v, "seed");
        rd.maybe_number (root, "", "log_interval", cfg.log_interval);
        rd.maybe_number (root, "", "metrics_skip", cfg.metrics_skip);
        if (const YAML::Node v = root["flow"])
        {
            if (!v.IsSequence () || v.size () != 2)
                rd.fail (v, "'flow' must be [vx, vy]");
            cfg.flow = {rd.number (v[0], "flow"), rd.number (v[1], "flow")};
        }

        cfg.behavior.shape = detail::parse_shape (rd, rd.require (root, "", "shape"));
        detail::parse_behavior (rd, rd.require (root, "", "behavior"), cfg.behavior);
        if (const YAML::Node list = root["agents"])
        {
            if (!list.IsSequence ())
                rd.fail (list, "'agents' must be a list of per-agent overrides");
            for (std::size_t i = 0; i < list.size (); ++i)
                detail::parse_override (rd, list[i], "agents[" + std::to_string (i) + "]", cfg.agent_overrides.emplace_back ());
        }
        if (const YAML::Node v = root["dynamics"])
            detail::parse_dynamics (rd, v, cfg.dynamics);
        if (const YAML::Node v = root["channel"])
            detail::parse_channel (rd, v, cfg.channel);
        if (const YAML::Node v = root["initial_poses"])
            detail::parse_initial (rd, v, cfg.initial);

        try
        {
            cfg.validate ();
        }
        catch (const ConfigError &e)
        {
            throw ConfigParseError (source, 0, 0, e.what ());
        }
        return cfg;
    }

    [[nodiscard]] inline ScenarioConfig load_config (const std::filesystem::path &path)
    {
        std::ifstream in (path, std::ios::binary);
        if (!in)
            throw ConfigParseError (path.string (), 0, 0, "cannot open file");
        std::ostringstream ss;
        ss << in.rdbuf ();
        return parse_config (ss.str (), path.string ());
    }

    /// Complete, explicit YAML rendering of `cfg`.
    [[nodiscard]] inline std::string emit_config (const ScenarioConfig &cfg)
    {
        const auto num = format_number;
        std::string o;
        auto line = [&] (const std::string &s) { o += s + "\n"; };

        line ("name: \"" + cfg.name + "\"");
        line ("n_agents: " + std::to_string (cfg.n_agents));
        line ("duration: " + num (cfg.duration));
        line ("dt: " + num (cfg.dynamics.dt));
        line ("seed: " + std::to_string (cfg.seed));
        line ("log_interval: " + num (cfg.log_interval));
        line ("metrics_skip: " + num (cfg.metrics_skip));
        line ("flow: [" + num (cfg.flow.x) + ", " + num (cfg.flow.y) + "]");

        const ShapeSpec &shape = cfg.shape ();
        line ("shape:");
        if (shape.kind () == ShapeKind::circle)
        {
            line ("  type: circle");
            line ("  radius: " + num (shape.radius ()));
        }
        else if (shape.label () == "square")
        {
            line ("  type: square");
            line ("  side: " + num (shape.characteristic_length ()));
        }
        else if (shape.label () == "star")
        {
            line ("  type: star");
            line ("  outer: " + num (shape.vertices ()[0].x));
            line ("  inner: " + num (shape.vertices ()[1].x));
        }
        else
        {
            line ("  type: polygon");
            line ("  vertices:");
            for (const Vec2 &v : shape.vertices ())
                line ("    - [" + num (v.x) + ", " + num (v.y) + "]");
        }

        const BehaviorConfig &b = cfg.behavior;
        line ("behavior:");
        line ("  mode: " + std::string (to_string (b.mode)));
        line ("  D: " + std::string (to_string (b.direction)));
        line ("  k: " + num (b.gain_deg_per_m));
        line ("  k_rate: " + num (b.rate_gain_deg_per_s));
        line ("  delta_psi: " + num (b.rotation_step_deg));
        line ("  window_len: " + std::to_string (b.window_len));
        line ("  window_max_age: " + num (b.window_max_age));
        line ("  heading_update_dt: " + num (b.heading_update_dt));
        line ("  fx: " + num (b.fx));
        line ("  min_conditioning: " + num (b.min_conditioning));
        line ("  max_correction: " + num (b.max_correction_deg));
        line ("  pairing: " + std::string (to_string (b.pairing)));

        if (!cfg.agent_overrides.empty ())
        {
            line ("agents:");
            for (const AgentOverride &a : cfg.agent_overrides)
            {
                std::string entry;
                auto add = [&] (const std::string &kv) { entry += (entry.empty () ? "" : ", ") + kv; };
                if (a.mode)
                    add ("mode: " + std::string (to_string (*a.mode)));
                if (a.direction)
                    add ("D: " + std::string (to_string (*a.direction)));
                if (a.gain_deg_per_m)
                    add ("k: " + num (*a.gain_deg_per_m));
                if (a.rate_gain_deg_per_s)
                    add ("k_rate: " + num (*a.rate_gain_deg_per_s));
                if (a.rotation_step_deg)
                    add ("delta_psi: " + num (*a.rotation_step_deg));
                if (a.window_len)
                    add ("window_len: " + std::to_string (*a.window_len));
                if (a.fx)
                    add ("fx: " + num (*a.fx));
                line ("  - {" + entry + "}");
            }
        }

        const DynamicsParams &d = cfg.dynamics;
        line ("dynamics:");
        line ("  x_u: " + num (d.x_u));
        line ("  x_uu: " + num (d.x_uu));
        line ("  y_v: " + num (d.y_v));
        line ("  y_vv: " + num (d.y_vv));
        line ("  mass: " + num (d.mass));
        line ("  heading_rate: " + num (d.heading_rate_deg));

        const ChannelConfig &c = cfg.channel;
        line ("channel:");
        line ("  slot_time: " + num (c.slot_time));
        line ("  loss_prob: " + num (c.loss_prob));
        line ("  rate_source: " + std::string (to_string (c.rate_source)));
        line ("  range_noise_std: " + num (c.range_noise_std));
        line ("  doppler_noise_std: " + num (c.doppler_noise_std));
        line ("  ranging_increment: " + num (c.ranging_increment));
        line ("  timing_mode: " + std::string (to_string (c.timing_mode)));
        line ("  latency_slots: " + std::to_string (c.latency_slots));

        line ("initial_poses:");
        line (std::string ("  placement: ") + (cfg.initial.placement == Placement::explicit_poses ? "explicit" : "random"));
        line ("  spawn_fraction: " + num (cfg.initial.spawn_fraction));
        if (!cfg.initial.poses.empty ())
        {
            line ("  poses:");
            for (const Pose &p : cfg.initial.poses)
                line ("    - [" + num (p.x) + ", " + num (p.y) + ", " + num (p.heading_deg) + "]");
        }
        return o;
    }

} // namespace fencemill::io
