#pragma once
/**
 * @file   report_json.hpp
 * @brief  JSON rendering of metrics reports. Absent values are null.
 */

#include "../report.hpp"

#include <json.hpp>

#include <optional>
#include <span>

namespace fencemill::io
{
    namespace detail
    {
        template <typename T>
        [[nodiscard]] nlohmann::json or_null (const std::optional<T> &v)
        {
            return v ? nlohmann::json (*v) : nlohmann::json (nullptr);
        }

        [[nodiscard]] inline nlohmann::json milling_json (const MillingMetrics &m)
        {
            return {{"mre", m.mre},
                    {"mean_radius", m.r_mean},
                    {"accuracy", m.accuracy},
                    {"precision", m.precision},
                    {"settle_time", or_null (m.settle_time)},
                    {"samples", m.n}};
        }
    } // namespace detail

    [[nodiscard]] inline nlohmann::json to_json (const MetricsReport &r)
    {
        nlohmann::json j = {{"scenario", r.scenario},
                            {"shape", r.shape},
                            {"shape_size", r.shape_size},
                            {"mode", r.mode},
                            {"n_agents", r.n_agents},
                            {"fx", r.fx},
                            {"family", r.family == BehaviorFamily::fencing ? "fencing" : "milling"},
                            {"source", r.source == MetricSource::truth ? "truth" : "ranges"}};

        if (r.family == BehaviorFamily::fencing)
        {
            nlohmann::json dips = nlohmann::json::array ();
            for (const Dip &d : r.dips)
                dips.push_back ({{"t_start", d.t_start},
                                 {"t_end", d.t_end},
                                 {"peak", d.peak},
                                 {"return_time", d.return_time},
                                 {"complete", d.complete},
                                 {"peak_position", {d.peak_position.x, d.peak_position.y}},
                                 {"centroid", {d.centroid.x, d.centroid.y}}});
            j["dips"] = dips;
            if (r.fencing)
                j["fencing"] = {{"mre", r.fencing->mre},
                                {"mpe", r.fencing->mpe},
                                {"art", detail::or_null (r.fencing->art)},
                                {"dips", r.fencing->dips},
                                {"complete_dips", r.fencing->complete_dips}};
            else
                j["fencing"] = {{"mre", nullptr}, {"mpe", nullptr}, {"art", nullptr}, {"dips", 0}, {"complete_dips", 0}};
            j["overshoot_centroid"] = r.overshoot_centroid ? nlohmann::json {r.overshoot_centroid->x, r.overshoot_centroid->y} : nlohmann::json (nullptr);
        }
        else
        {
            j["milling"] = r.milling ? detail::milling_json (*r.milling) : nlohmann::json (nullptr);
            nlohmann::json per = nlohmann::json::array ();
            for (const MillingMetrics &m : r.milling_per_agent)
                per.push_back (detail::milling_json (m));
            j["per_agent"] = per;
        }
        return j;
    }

    [[nodiscard]] inline nlohmann::json to_json (std::span<const MetricsReport> reports)
    {
        nlohmann::json out = nlohmann::json::array ();
        for (const MetricsReport &r : reports)
            out.push_back (to_json (r));
        return out;
    }

} // namespace fencemill::io
