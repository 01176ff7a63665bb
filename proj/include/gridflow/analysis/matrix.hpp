#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridflow/des/fault.hpp"
#include "gridflow/experiment/io.hpp"

namespace gridflow::analysis {

inline constexpr std::size_t factor_count = 6;
inline constexpr std::size_t response_count = 4;

enum class Factor : std::uint8_t { Trr, IaGt, IaFt, Gtesb, Tlb, TlMode };
enum class Response : std::uint8_t { TotalTime, WaitTime, Exited, Wip };

inline constexpr std::array<Factor, factor_count> all_factors{Factor::Trr,   Factor::IaGt, Factor::IaFt,
                                                              Factor::Gtesb, Factor::Tlb,  Factor::TlMode};
inline constexpr std::array<Response, response_count> all_responses{Response::TotalTime, Response::WaitTime,
                                                                    Response::Exited, Response::Wip};

inline std::string_view factor_name(Factor f)
{
    static constexpr std::array<std::string_view, factor_count> names{"trr",   "ia_gt_s", "ia_ft_s",
                                                                      "gtesb", "tlb",     "tl_mode"};
    return names[static_cast<std::size_t>(f)];
}

inline std::optional<Factor> parse_factor(std::string_view name)
{
    for (Factor f : all_factors) {
        if (factor_name(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

inline std::string_view response_name(Response r)
{
    static constexpr std::array<std::string_view, response_count> names{
        "ft_total_time_mean_min", "ft_wait_time_mean_min", "ft_exited", "ft_wip_end"};
    return names[static_cast<std::size_t>(r)];
}

/// Time responses are undefined for replications in which no FT exited.
constexpr bool is_time_response(Response r) noexcept
{
    return r == Response::TotalTime || r == Response::WaitTime;
}

using LevelIndex = std::uint16_t;

/// Per-(scenario, replication) table of factor levels and responses. Factors
/// are categorical; each factor's levels are kept in natural order (rule enum
/// order, numeric order, light-mode enum order).
class ResponseMatrix {
public:
    struct Row {
        std::uint64_t scenario_id = 0;
        std::array<LevelIndex, factor_count> level{};
        std::array<double, response_count> y{};
        bool any_exited = false;
    };

    static ResponseMatrix from_results(const std::vector<experiment::ResultRow>& results)
    {
        // sort key -> label, per factor
        std::array<std::map<double, std::string>, factor_count> seen;
        auto keys = [](const experiment::ResultRow& r) {
            return std::array<std::pair<double, std::string>, factor_count>{
                std::pair{static_cast<double>(r.trr), std::string(traffic::to_string(r.trr))},
                std::pair{r.ia_gt_s, experiment::format_real(r.ia_gt_s)},
                std::pair{r.ia_ft_s, experiment::format_real(r.ia_ft_s)},
                std::pair{r.gtesb, experiment::format_real(r.gtesb)},
                std::pair{r.tlb, experiment::format_real(r.tlb)},
                std::pair{static_cast<double>(r.tl_mode), std::string(experiment::to_string(r.tl_mode))}};
        };
        for (const auto& r : results) {
            const auto k = keys(r);
            for (std::size_t f = 0; f < factor_count; ++f) {
                seen[f].emplace(k[f].first, k[f].second);
            }
        }
        ResponseMatrix m;
        std::array<std::map<double, LevelIndex>, factor_count> index;
        for (std::size_t f = 0; f < factor_count; ++f) {
            for (const auto& [key, label] : seen[f]) {
                index[f].emplace(key, static_cast<LevelIndex>(m.levels_[f].size()));
                m.levels_[f].push_back(label);
            }
        }
        for (const auto& r : results) {
            const auto k = keys(r);
            Row row;
            row.scenario_id = r.scenario_id;
            for (std::size_t f = 0; f < factor_count; ++f) {
                row.level[f] = index[f].at(k[f].first);
            }
            row.y = {r.responses.ft_total_time_mean_min, r.responses.ft_wait_time_mean_min,
                     static_cast<double>(r.responses.ft_exited), static_cast<double>(r.responses.ft_wip_end)};
            row.any_exited = r.responses.ft_exited > 0;
            m.rows_.push_back(row);
        }
        return m;
    }

    static ResponseMatrix from_parts(std::array<std::vector<std::string>, factor_count> levels, std::vector<Row> rows)
    {
        ResponseMatrix m;
        m.levels_ = std::move(levels);
        m.rows_ = std::move(rows);
        for (const auto& r : m.rows_) {
            for (std::size_t f = 0; f < factor_count; ++f) {
                if (r.level[f] >= m.levels_[f].size()) {
                    throw DataError("row references an unknown level of " + std::string(factor_name(all_factors[f])));
                }
            }
        }
        return m;
    }

    const std::vector<Row>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const std::vector<std::string>& levels(Factor f) const { return levels_[static_cast<std::size_t>(f)]; }
    std::size_t level_count(Factor f) const { return levels(f).size(); }
    const std::array<std::vector<std::string>, factor_count>& all_levels() const noexcept { return levels_; }

    const std::string& label(const Row& r, Factor f) const
    {
        return levels(f)[r.level[static_cast<std::size_t>(f)]];
    }

    std::optional<LevelIndex> find_level(Factor f, std::string_view label) const
    {
        const auto& l = levels(f);
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (l[i] == label) {
                return static_cast<LevelIndex>(i);
            }
        }
        return std::nullopt;
    }

    /// Number of rows in every cell of the full level grid, if all cells hold
    /// the same number; nullopt when the layout is unbalanced or incomplete.
    std::optional<std::size_t> replicates_per_cell() const
    {
        std::size_t cells = 1;
        for (const auto& l : levels_) {
            cells *= l.size();
        }
        std::map<std::array<LevelIndex, factor_count>, std::size_t> counts;
        for (const auto& r : rows_) {
            ++counts[r.level];
        }
        if (rows_.empty() || counts.size() != cells) {
            return std::nullopt;
        }
        const std::size_t n = counts.begin()->second;
        for (const auto& [cell, c] : counts) {
            if (c != n) {
                return std::nullopt;
            }
        }
        return n;
    }

    /// Rows whose levels match every (factor, level) pair. Level lists are kept
    /// unchanged so labels stay comparable with the parent matrix.
    ResponseMatrix filter(const std::vector<std::pair<Factor, LevelIndex>>& fixed) const
    {
        ResponseMatrix m;
        m.levels_ = levels_;
        for (const auto& r : rows_) {
            bool keep = true;
            for (const auto& [f, l] : fixed) {
                keep = keep && r.level[static_cast<std::size_t>(f)] == l;
            }
            if (keep) {
                m.rows_.push_back(r);
            }
        }
        return m;
    }

private:
    std::array<std::vector<std::string>, factor_count> levels_;
    std::vector<Row> rows_;
};

} // namespace gridflow::analysis
