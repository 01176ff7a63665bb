#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gridflow/des/fault.hpp"
#include "gridflow/des/trace.hpp"
#include "gridflow/experiment/runner.hpp"
#include "gridflow/experiment/scenario.hpp"

namespace gridflow::experiment {

using des::format_real;

inline const std::vector<std::string>& results_columns()
{
    static const std::vector<std::string> cols{
        "scenario_id", "replication", "trr",       "ia_gt_s",  "ia_ft_s",
        "gtesb",       "tlb",         "tl_mode",   "base_seed", "ft_total_time_mean_min",
        "ft_wait_time_mean_min",      "ft_exited", "ft_wip_end"};
    return cols;
}

/// One row of the results file: a (scenario, replication) pair with its
/// factor levels and the four responses.
struct ResultRow {
    std::uint64_t scenario_id = 0;
    std::uint32_t replication = 0;
    RoutingRule trr = RoutingRule::SD;
    double ia_gt_s = 0.0;
    double ia_ft_s = 0.0;
    double gtesb = 0.0;
    double tlb = 0.0;
    LightMode tl_mode = LightMode::Synchronized;
    std::uint64_t base_seed = 0;
    traffic::ResponseSet responses;
};

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline double parse_real(std::string_view text, const std::string& field)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(field, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

inline std::uint64_t parse_count(std::string_view text, const std::string& field)
{
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(field, "not a non-negative integer: '" + std::string(text) + "'");
    }
    return value;
}

inline void write_results_header(std::ostream& os)
{
    const auto& cols = results_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << cols[i];
    }
    os << '\n';
}

inline void write_result_row(std::ostream& os, const ResultRow& r)
{
    os << r.scenario_id << ',' << r.replication << ',' << traffic::to_string(r.trr) << ',' << format_real(r.ia_gt_s)
       << ',' << format_real(r.ia_ft_s) << ',' << format_real(r.gtesb) << ',' << format_real(r.tlb) << ','
       << to_string(r.tl_mode) << ',' << r.base_seed << ',' << format_real(r.responses.ft_total_time_mean_min) << ','
       << format_real(r.responses.ft_wait_time_mean_min) << ',' << r.responses.ft_exited << ','
       << r.responses.ft_wip_end << '\n';
}

inline std::vector<ResultRow> rows_of(const ScenarioResult& result)
{
    std::vector<ResultRow> rows;
    const ScenarioConfig& c = result.config;
    for (std::uint32_t r = 0; r < result.replications.size(); ++r) {
        rows.push_back(ResultRow{c.scenario_id, r, c.trr, c.ia_gt_s, c.ia_ft_s, c.gtesb, c.tlb, c.tl_mode,
                                 c.base_seed, result.replications[r].responses});
    }
    return rows;
}

inline void write_scenario_rows(std::ostream& os, const ScenarioResult& result)
{
    for (const auto& row : rows_of(result)) {
        write_result_row(os, row);
    }
}

/// Parses a results file. The header must carry exactly the expected columns;
/// a mismatch is reported with the offending column names.
inline std::vector<ResultRow> read_results(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || trim(line).empty()) {
        throw DataError("results file is empty");
    }
    const auto header = split(line, ',');
    const auto& expected = results_columns();
    if (header != expected) {
        std::set<std::string> have(header.begin(), header.end());
        std::set<std::string> want(expected.begin(), expected.end());
        std::string missing, unexpected;
        for (const auto& c : want) {
            if (!have.count(c)) missing += (missing.empty() ? "" : " ") + c;
        }
        for (const auto& c : have) {
            if (!want.count(c)) unexpected += (unexpected.empty() ? "" : " ") + c;
        }
        std::string msg = "results header mismatch;";
        if (!missing.empty()) msg += " missing columns: " + missing + ";";
        if (!unexpected.empty()) msg += " unexpected columns: " + unexpected + ";";
        if (missing.empty() && unexpected.empty()) msg += " columns out of order";
        throw DataError(msg);
    }

    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != expected.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected.size()) +
                            " fields, got " + std::to_string(f.size()));
        }
        try {
            ResultRow r;
            r.scenario_id = parse_count(f[0], "scenario_id");
            r.replication = static_cast<std::uint32_t>(parse_count(f[1], "replication"));
            r.trr = parse_rule(f[2]);
            r.ia_gt_s = parse_real(f[3], "ia_gt_s");
            r.ia_ft_s = parse_real(f[4], "ia_ft_s");
            r.gtesb = parse_real(f[5], "gtesb");
            r.tlb = parse_real(f[6], "tlb");
            r.tl_mode = parse_light_mode(f[7]);
            r.base_seed = parse_count(f[8], "base_seed");
            r.responses.ft_total_time_mean_min = parse_real(f[9], "ft_total_time_mean_min");
            r.responses.ft_wait_time_mean_min = parse_real(f[10], "ft_wait_time_mean_min");
            r.responses.ft_exited = parse_count(f[11], "ft_exited");
            r.responses.ft_wip_end = parse_count(f[12], "ft_wip_end");
            rows.push_back(r);
        } catch (const ConfigError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (rows.empty()) {
        throw DataError("results file has no data rows");
    }
    return rows;
}

/// Grid/config file: `key = value` lines, `#` comments, list values comma
/// separated. Keys are the ScenarioConfig field names.
struct GridFile {
    FactorGrid grid;
    RunDefaults defaults;
    // keys present in the file
    std::set<std::string> keys;
};

inline GridFile parse_grid_file(std::istream& is)
{
    GridFile out;
    std::string line;
    std::size_t line_no = 0;
    auto reals = [](const std::string& value, const std::string& key) {
        std::vector<double> v;
        for (const auto& item : split(value, ',')) {
            v.push_back(parse_real(item, key));
        }
        return v;
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!out.keys.insert(key).second) {
            throw ConfigError(key, "given more than once");
        }
        if (key == "trr") {
            out.grid.trr.clear();
            for (const auto& item : split(value, ',')) out.grid.trr.push_back(parse_rule(item));
        } else if (key == "ia_gt_s") {
            out.grid.ia_gt_s = reals(value, key);
        } else if (key == "ia_ft_s") {
            out.grid.ia_ft_s = reals(value, key);
        } else if (key == "gtesb") {
            out.grid.gtesb = reals(value, key);
        } else if (key == "tlb") {
            out.grid.tlb = reals(value, key);
        } else if (key == "tl_mode") {
            out.grid.tl_mode.clear();
            for (const auto& item : split(value, ',')) out.grid.tl_mode.push_back(parse_light_mode(item));
        } else if (key == "horizon_s") {
            out.defaults.horizon_s = parse_real(value, key);
        } else if (key == "replications") {
            out.defaults.replications = static_cast<std::uint32_t>(parse_count(value, key));
        } else if (key == "base_seed") {
            out.defaults.base_seed = parse_count(value, key);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (!(out.defaults.horizon_s > 0.0)) {
        throw ConfigError("horizon_s", "must be positive");
    }
    if (out.defaults.replications < 1) {
        throw ConfigError("replications", "must be at least 1");
    }
    return out;
}

/// Checkpoint file: one completed scenario id per line.
inline std::set<std::uint64_t> read_checkpoint(std::istream& is, std::size_t scenario_count)
{
    std::set<std::uint64_t> done;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        std::uint64_t id = 0;
        try {
            id = parse_count(t, "scenario_id");
        } catch (const ConfigError&) {
            throw DataError("checkpoint line " + std::to_string(line_no) + " is not a scenario id: '" + t + "'");
        }
        if (id >= scenario_count) {
            throw DataError("checkpoint line " + std::to_string(line_no) + ": scenario id " + t + " is out of range");
        }
        if (!done.insert(id).second) {
            throw DataError("checkpoint line " + std::to_string(line_no) + ": duplicate scenario id " + t);
        }
    }
    return done;
}

} // namespace gridflow::experiment
