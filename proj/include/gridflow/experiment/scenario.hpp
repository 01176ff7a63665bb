#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "gridflow/des/fault.hpp"
#include "gridflow/des/trace.hpp"
#include "gridflow/traffic/simulation.hpp"

namespace gridflow::experiment {

using traffic::LightMode;
using traffic::RoutingRule;

inline constexpr std::initializer_list<double> arrival_levels{20.0, 40.0, 60.0, 120.0};
inline constexpr std::initializer_list<double> gtesb_levels{0.50, 0.70, 0.90};
inline constexpr std::initializer_list<double> tlb_levels{0.10, 0.15, 0.20};

inline std::string_view to_string(LightMode m)
{
    return m == LightMode::Synchronized ? "Synchronized" : "Desynchronized";
}

inline std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

inline RoutingRule parse_rule(std::string_view text, const std::string& field = "trr")
{
    const std::string t = lowercase(text);
    if (t == "sd") return RoutingRule::SD;
    if (t == "st") return RoutingRule::ST;
    if (t == "lc") return RoutingRule::LC;
    throw ConfigError(field, "unknown routing rule '" + std::string(text) + "' (expected SD, ST or LC)");
}

inline LightMode parse_light_mode(std::string_view text, const std::string& field = "tl_mode")
{
    const std::string t = lowercase(text);
    if (t == "sync" || t == "synchronized") return LightMode::Synchronized;
    if (t == "desync" || t == "desynchronized") return LightMode::Desynchronized;
    throw ConfigError(field, "unknown light mode '" + std::string(text) + "' (expected sync or desync)");
}

inline bool on_levels(double value, std::initializer_list<double> levels)
{
    return std::any_of(levels.begin(), levels.end(), [&](double l) { return std::abs(l - value) < 1e-9; });
}

/// Levels for each of the six factors. The full grid has 3*4*4*3*3*2 = 864 cells.
struct FactorGrid {
    std::vector<RoutingRule> trr{RoutingRule::SD, RoutingRule::ST, RoutingRule::LC};
    std::vector<double> ia_gt_s{arrival_levels};
    std::vector<double> ia_ft_s{arrival_levels};
    std::vector<double> gtesb{gtesb_levels};
    std::vector<double> tlb{tlb_levels};
    std::vector<LightMode> tl_mode{LightMode::Synchronized, LightMode::Desynchronized};

    std::size_t scenario_count() const noexcept
    {
        return trr.size() * ia_gt_s.size() * ia_ft_s.size() * gtesb.size() * tlb.size() * tl_mode.size();
    }

    void validate(bool allow_offgrid = false) const
    {
        auto non_empty = [](const auto& v, const char* name) {
            if (v.empty()) {
                throw ConfigError(name, "level set is empty");
            }
        };
        non_empty(trr, "trr");
        non_empty(ia_gt_s, "ia_gt_s");
        non_empty(ia_ft_s, "ia_ft_s");
        non_empty(gtesb, "gtesb");
        non_empty(tlb, "tlb");
        non_empty(tl_mode, "tl_mode");
        auto check = [&](const std::vector<double>& values, std::initializer_list<double> levels, const char* name,
                         bool probability) {
            for (double v : values) {
                if (probability ? !(v >= 0.0 && v <= 1.0) : !(v > 0.0 && std::isfinite(v))) {
                    throw ConfigError(name, "value " + des::format_real(v) + " is out of range");
                }
                if (!allow_offgrid && !on_levels(v, levels)) {
                    throw ConfigError(name, "value " + des::format_real(v) +
                                                " is not a standard level (use --allow-offgrid)");
                }
            }
        };
        check(ia_gt_s, arrival_levels, "ia_gt_s", false);
        check(ia_ft_s, arrival_levels, "ia_ft_s", false);
        check(gtesb, gtesb_levels, "gtesb", true);
        check(tlb, tlb_levels, "tlb", true);
    }
};

/// Horizon, replication count and seed shared by every scenario of a run.
struct RunDefaults {
    double horizon_s = 86400.0;
    std::uint32_t replications = 30;
    std::uint64_t base_seed = 20190101;
};

struct ScenarioConfig {
    std::uint64_t scenario_id = 0;
    RoutingRule trr = RoutingRule::SD;
    double ia_gt_s = 20.0;
    double ia_ft_s = 20.0;
    double gtesb = 0.7;
    double tlb = 0.15;
    LightMode tl_mode = LightMode::Synchronized;
    double horizon_s = 86400.0;
    std::uint32_t replications = 30;
    std::uint64_t base_seed = 20190101;

    traffic::ModelParams model() const
    {
        traffic::ModelParams p;
        p.rule = trr;
        p.ia_gt_s = ia_gt_s;
        p.ia_ft_s = ia_ft_s;
        p.gtesb = gtesb;
        p.tlb = tlb;
        p.light = tl_mode;
        p.horizon_s = horizon_s;
        return p;
    }

    void validate(bool allow_offgrid = false) const
    {
        FactorGrid single{{trr}, {ia_gt_s}, {ia_ft_s}, {gtesb}, {tlb}, {tl_mode}};
        single.validate(allow_offgrid);
        if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) {
            throw ConfigError("horizon_s", "must be positive");
        }
        if (replications < 1) {
            throw ConfigError("replications", "must be at least 1");
        }
    }
};

/// Cartesian product of the grid, trr outermost and tl_mode innermost.
/// scenario_id is the position in that order.
inline std::vector<ScenarioConfig> enumerate_scenarios(const FactorGrid& grid, const RunDefaults& defaults)
{
    grid.validate(true);
    std::vector<ScenarioConfig> out;
    out.reserve(grid.scenario_count());
    for (RoutingRule trr : grid.trr)
        for (double ia_gt : grid.ia_gt_s)
            for (double ia_ft : grid.ia_ft_s)
                for (double gtesb : grid.gtesb)
                    for (double tlb : grid.tlb)
                        for (LightMode tl : grid.tl_mode) {
                            ScenarioConfig c;
                            c.scenario_id = out.size();
                            c.trr = trr;
                            c.ia_gt_s = ia_gt;
                            c.ia_ft_s = ia_ft;
                            c.gtesb = gtesb;
                            c.tlb = tlb;
                            c.tl_mode = tl;
                            c.horizon_s = defaults.horizon_s;
                            c.replications = defaults.replications;
                            c.base_seed = defaults.base_seed;
                            out.push_back(c);
                        }
    return out;
}

} // namespace gridflow::experiment
