#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include "gridflow/analysis/compare.hpp"
#include "gridflow/analysis/desirability.hpp"
#include "gridflow/analysis/effects.hpp"
#include "gridflow/des/trace.hpp"

namespace gridflow::analysis {

using des::format_real;

/// Published ST-vs-SD reductions of mean FT wait and total time.
inline constexpr double reference_wait_reduction = 0.695;
inline constexpr double reference_total_reduction = 0.6572;

inline void write_effects_csv(std::ostream& os, const EffectsTable& t)
{
    os << "response,term,df,ss,f,p\n";
    for (const auto& r : t.responses) {
        for (const auto& term : r.terms) {
            os << response_name(r.response) << ',' << term.name() << ',' << format_real(term.df) << ','
               << format_real(term.ss) << ',' << format_real(term.f) << ',' << format_real(term.p) << '\n';
        }
        os << response_name(r.response) << ",residual," << format_real(r.df_residual) << ','
           << format_real(r.ss_residual) << ",,\n";
    }
}

inline void write_desirability_header(std::ostream& os)
{
    os << "scope,factor,level,composite_desirability\n";
}

/// Marginal composites per factor level, then the best scenario setting.
inline void write_desirability_rows(std::ostream& os, std::string_view scope, const ResponseMatrix& m,
                                    const DesirabilityReport& rep)
{
    for (const auto& lc : rep.marginals) {
        os << scope << ',' << factor_name(lc.factor) << ',' << lc.label << ',' << format_real(lc.composite) << '\n';
    }
    os << scope << ",best_setting," << rep.describe_best(m) << ','
       << format_real(rep.scenario_composite[rep.best_scenario]) << '\n';
}

inline void write_comparison_csv(std::ostream& os, const ComparisonReport& c)
{
    os << "rule,tl_mode,metric,mean,median,q1,q3,whisker_lo,whisker_hi,n_outliers\n";
    for (const auto& e : c.entries) {
        const auto& s = e.stats;
        os << e.rule << ',' << (e.tl_mode.empty() ? "all" : e.tl_mode) << ',' << response_name(e.metric) << ','
           << format_real(s.mean) << ',' << format_real(s.median) << ',' << format_real(s.q1) << ','
           << format_real(s.q3) << ',' << format_real(s.whisker_lo) << ',' << format_real(s.whisker_hi) << ','
           << s.n_outliers << '\n';
    }
}

inline void write_reductions_csv(std::ostream& os, const ComparisonReport& c)
{
    os << "rule_a,rule_b,metric,reduction_fraction\n";
    for (const auto& r : c.reductions) {
        os << r.rule_a << ',' << r.rule_b << ',' << response_name(r.metric) << ',' << format_real(r.fraction)
           << '\n';
    }
}

inline std::string percent(double fraction)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
    return buf;
}

/// Human-readable summary: rule means and every pairwise reduction, with the
/// published ST-vs-SD figures shown as reference annotations.
inline void write_summary(std::ostream& os, const ComparisonReport& c)
{
    os << "Routing rule comparison (FT, minutes)\n";
    for (const auto& e : c.entries) {
        if (!e.tl_mode.empty()) {
            continue;
        }
        os << "  " << e.rule << "  " << response_name(e.metric) << ": mean " << format_real(e.stats.mean)
           << ", median " << format_real(e.stats.median) << " (n=" << e.stats.n << ")\n";
    }
    if (c.masked_rows > 0) {
        os << "  " << c.masked_rows << " replication(s) with no exited FT masked from time responses\n";
    }
    os << "\nReductions, computed as 1 - mean_A/mean_B\n";
    for (const auto& r : c.reductions) {
        os << "  " << r.rule_a << " vs " << r.rule_b << "  " << response_name(r.metric) << ": "
           << percent(r.fraction) << '\n';
    }
    const auto wait = c.reduction("ST", "SD", Response::WaitTime);
    const auto total = c.reduction("ST", "SD", Response::TotalTime);
    if (wait && total) {
        os << "\nST vs SD\n"
           << "  wait time:  computed " << percent(*wait) << "   published reference " << percent(reference_wait_reduction)
           << '\n'
           << "  total time: computed " << percent(*total) << "   published reference "
           << percent(reference_total_reduction) << '\n'
           << "  (reference values are quoted from the literature, not computed here)\n";
    }
}

} // namespace gridflow::analysis
