#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gridflow/analysis/matrix.hpp"
#include "gridflow/des/fault.hpp"

namespace gridflow::analysis {

/// Box-plot summary with Tukey 1.5×IQR whiskers.
struct BoxStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::size_t n_outliers = 0;
};

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) {
        throw DataError("quantile of an empty sample");
    }
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline BoxStats box_stats(std::vector<double> xs)
{
    BoxStats b;
    b.n = xs.size();
    if (xs.empty()) {
        return b;
    }
    std::sort(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    b.mean = sum / static_cast<double>(xs.size());
    b.median = quantile_sorted(xs, 0.5);
    b.q1 = quantile_sorted(xs, 0.25);
    b.q3 = quantile_sorted(xs, 0.75);
    const double iqr = b.q3 - b.q1;
    const double fence_lo = b.q1 - 1.5 * iqr;
    const double fence_hi = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.q1;
    b.whisker_hi = b.q3;
    bool any_inside = false;
    for (double x : xs) {
        if (x < fence_lo || x > fence_hi) {
            ++b.n_outliers;
            continue;
        }
        if (!any_inside) {
            b.whisker_lo = b.whisker_hi = x;
            any_inside = true;
        }
        b.whisker_lo = std::min(b.whisker_lo, x);
        b.whisker_hi = std::max(b.whisker_hi, x);
    }
    return b;
}

struct ComparisonEntry {
    std::string rule;
    // empty for all modes pooled
    std::string tl_mode;
    Response metric = Response::WaitTime;
    BoxStats stats;
};

struct Reduction {
    std::string rule_a;
    std::string rule_b;
    Response metric = Response::WaitTime;
    // 1 - mean_a / mean_b
    double fraction = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    std::vector<Reduction> reductions;
    // rows masked from the time responses because no FT exited
    std::size_t masked_rows = 0;

    const ComparisonEntry& entry(std::string_view rule, std::string_view tl_mode, Response metric) const
    {
        for (const auto& e : entries) {
            if (e.rule == rule && e.tl_mode == tl_mode && e.metric == metric) {
                return e;
            }
        }
        throw DataError("no comparison entry for " + std::string(rule));
    }

    std::optional<double> reduction(std::string_view a, std::string_view b, Response metric) const
    {
        for (const auto& r : reductions) {
            if (r.rule_a == a && r.rule_b == b && r.metric == metric) {
                return r.fraction;
            }
        }
        return std::nullopt;
    }
};

inline constexpr std::array<Response, 2> compared_metrics{Response::WaitTime, Response::TotalTime};

/// Reduction of A relative to B.
inline double reduction_fraction(double mean_a, double mean_b)
{
    return 1.0 - mean_a / mean_b;
}

/// Per rule (pooled and per light mode) box statistics of FT wait and total
/// time over scenario-replication rows, and pairwise reductions of the pooled
/// rule means.
inline ComparisonReport compare_rules(const ResponseMatrix& m)
{
    const auto& rules = m.levels(Factor::Trr);
    const auto& modes = m.levels(Factor::TlMode);
    std::vector<bool> rule_present(rules.size(), false);
    for (const auto& r : m.rows()) {
        rule_present[r.level[static_cast<std::size_t>(Factor::Trr)]] = true;
    }
    if (std::count(rule_present.begin(), rule_present.end(), true) < 2) {
        throw DataError("rule comparison needs results for at least 2 routing rules");
    }

    ComparisonReport rep;
    for (const auto& r : m.rows()) {
        if (!r.any_exited) {
            ++rep.masked_rows;
        }
    }
    auto sample = [&](std::size_t rule, std::optional<std::size_t> mode, Response metric) {
        std::vector<double> xs;
        for (const auto& r : m.rows()) {
            if (r.level[static_cast<std::size_t>(Factor::Trr)] != rule || !r.any_exited) {
                continue;
            }
            if (mode && r.level[static_cast<std::size_t>(Factor::TlMode)] != *mode) {
                continue;
            }
            xs.push_back(r.y[static_cast<std::size_t>(metric)]);
        }
        return xs;
    };

    for (std::size_t rule = 0; rule < rules.size(); ++rule) {
        if (!rule_present[rule]) {
            continue;
        }
        for (Response metric : compared_metrics) {
            rep.entries.push_back({rules[rule], "", metric, box_stats(sample(rule, std::nullopt, metric))});
            for (std::size_t mode = 0; mode < modes.size(); ++mode) {
                auto xs = sample(rule, mode, metric);
                if (!xs.empty()) {
                    rep.entries.push_back({rules[rule], modes[mode], metric, box_stats(std::move(xs))});
                }
            }
        }
    }

    for (std::size_t a = 0; a < rules.size(); ++a) {
        for (std::size_t b = 0; b < rules.size(); ++b) {
            if (a == b || !rule_present[a] || !rule_present[b]) {
                continue;
            }
            for (Response metric : compared_metrics) {
                const double ma = rep.entry(rules[a], "", metric).stats.mean;
                const double mb = rep.entry(rules[b], "", metric).stats.mean;
                rep.reductions.push_back({rules[a], rules[b], metric, reduction_fraction(ma, mb)});
            }
        }
    }
    return rep;
}

} // namespace gridflow::analysis
