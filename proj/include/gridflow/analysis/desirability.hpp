#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridflow/analysis/matrix.hpp"
#include "gridflow/des/fault.hpp"

namespace gridflow::analysis {

enum class Goal : std::uint8_t { Minimize, Maximize };

/// Goal per response; anchors come from the data.
struct DesirabilitySpec {
    std::array<Goal, response_count> goals{Goal::Minimize, Goal::Minimize, Goal::Maximize, Goal::Minimize};
};

/// Observed worst/best scenario means per response.
struct Anchors {
    std::array<double, response_count> worst{};
    std::array<double, response_count> best{};
    std::array<bool, response_count> constant{};
};

/// Response means of one scenario (one full factor setting).
struct ScenarioMeans {
    std::uint64_t scenario_id = 0;
    std::array<LevelIndex, factor_count> level{};
    std::array<double, response_count> mean{};
    // time responses are masked for replications without exited FT
    std::array<bool, response_count> defined{};
    std::size_t masked_rows = 0;
};

inline std::vector<ScenarioMeans> scenario_means(const ResponseMatrix& m)
{
    std::map<std::array<LevelIndex, factor_count>, std::pair<ScenarioMeans, std::array<std::size_t, response_count>>>
        acc;
    for (const auto& r : m.rows()) {
        auto& [s, n] = acc[r.level];
        s.scenario_id = r.scenario_id;
        s.level = r.level;
        for (Response resp : all_responses) {
            const std::size_t i = static_cast<std::size_t>(resp);
            if (is_time_response(resp) && !r.any_exited) {
                continue;
            }
            s.mean[i] += r.y[i];
            ++n[i];
        }
        if (!r.any_exited) {
            ++s.masked_rows;
        }
    }
    std::vector<ScenarioMeans> out;
    for (auto& [key, entry] : acc) {
        auto& [s, n] = entry;
        for (std::size_t i = 0; i < response_count; ++i) {
            s.defined[i] = n[i] > 0;
            if (n[i] > 0) {
                s.mean[i] /= static_cast<double>(n[i]);
            }
        }
        out.push_back(s);
    }
    return out;
}

inline Anchors anchors_from(const std::vector<ScenarioMeans>& scenarios, const DesirabilitySpec& spec)
{
    Anchors a;
    for (std::size_t i = 0; i < response_count; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& s : scenarios) {
            if (s.defined[i]) {
                lo = std::min(lo, s.mean[i]);
                hi = std::max(hi, s.mean[i]);
            }
        }
        if (!(lo < hi)) {
            a.constant[i] = true;
            lo = hi = std::isfinite(lo) ? lo : 0.0;
        }
        if (spec.goals[i] == Goal::Minimize) {
            a.worst[i] = hi;
            a.best[i] = lo;
        } else {
            a.worst[i] = lo;
            a.best[i] = hi;
        }
    }
    return a;
}

/// Linear ramp from 0 at `worst` to 1 at `best`, clamped.
inline double individual_desirability(double y, double worst, double best)
{
    if (worst == best) {
        return 1.0;
    }
    return std::clamp((y - worst) / (best - worst), 0.0, 1.0);
}

/// Geometric mean of the individual desirabilities.
inline double composite_desirability(const std::array<double, response_count>& d)
{
    double log_sum = 0.0;
    for (double x : d) {
        if (x <= 0.0) {
            return 0.0;
        }
        log_sum += std::log(x);
    }
    return std::exp(log_sum / static_cast<double>(response_count));
}

inline double composite_for(const std::array<double, response_count>& means,
                            const std::array<bool, response_count>& defined, const Anchors& a)
{
    std::array<double, response_count> d{};
    for (std::size_t i = 0; i < response_count; ++i) {
        // an undefined time mean (no FT ever left) is as bad as it gets
        d[i] = defined[i] ? individual_desirability(means[i], a.worst[i], a.best[i]) : 0.0;
    }
    return composite_desirability(d);
}

struct LevelComposite {
    Factor factor = Factor::Trr;
    LevelIndex level = 0;
    std::string label;
    std::array<double, response_count> mean{};
    double composite = 0.0;
};

struct DesirabilityReport {
    Anchors anchors;
    std::vector<ScenarioMeans> scenarios;
    std::vector<double> scenario_composite;
    std::size_t best_scenario = 0;
    std::vector<LevelComposite> marginals;
    std::vector<std::string> warnings;

    /// Level of `f` with the highest marginal composite.
    const LevelComposite& best_level(Factor f) const
    {
        const LevelComposite* best = nullptr;
        for (const auto& m : marginals) {
            if (m.factor == f && (!best || m.composite > best->composite)) {
                best = &m;
            }
        }
        if (!best) {
            throw DataError("no marginal composites for factor " + std::string(factor_name(f)));
        }
        return *best;
    }

    std::string describe_best(const ResponseMatrix& m) const
    {
        std::string out;
        for (Factor f : all_factors) {
            out += (out.empty() ? "" : ";") + std::string(factor_name(f)) + "=" +
                   m.levels(f)[scenarios[best_scenario].level[static_cast<std::size_t>(f)]];
        }
        return out;
    }
};

/// Scores every scenario by composite desirability and reports, per factor
/// level, the composite of that level's marginal response means. Anchors are
/// the observed extreme scenario means, so rescaling a response leaves every
/// ranking unchanged.
inline DesirabilityReport desirability_rank(const ResponseMatrix& m, const DesirabilitySpec& spec = {})
{
    if (m.size() == 0) {
        throw DataError("desirability needs at least one row");
    }
    DesirabilityReport rep;
    rep.scenarios = scenario_means(m);
    rep.anchors = anchors_from(rep.scenarios, spec);
    for (Response r : all_responses) {
        if (rep.anchors.constant[static_cast<std::size_t>(r)]) {
            rep.warnings.push_back(std::string(response_name(r)) + " is constant across scenarios; desirability fixed at 1");
        }
    }

    for (const auto& s : rep.scenarios) {
        rep.scenario_composite.push_back(composite_for(s.mean, s.defined, rep.anchors));
    }
    rep.best_scenario = static_cast<std::size_t>(
        std::max_element(rep.scenario_composite.begin(), rep.scenario_composite.end()) - rep.scenario_composite.begin());

    for (Factor f : all_factors) {
        const std::size_t fi = static_cast<std::size_t>(f);
        for (LevelIndex l = 0; l < m.level_count(f); ++l) {
            LevelComposite lc;
            lc.factor = f;
            lc.level = l;
            lc.label = m.levels(f)[l];
            std::array<std::size_t, response_count> n{};
            for (const auto& s : rep.scenarios) {
                if (s.level[fi] != l) {
                    continue;
                }
                for (std::size_t i = 0; i < response_count; ++i) {
                    if (s.defined[i]) {
                        lc.mean[i] += s.mean[i];
                        ++n[i];
                    }
                }
            }
            if (std::all_of(n.begin(), n.end(), [](std::size_t c) { return c == 0; })) {
                continue; // level absent from this matrix (e.g. after slicing)
            }
            std::array<bool, response_count> defined{};
            for (std::size_t i = 0; i < response_count; ++i) {
                defined[i] = n[i] > 0;
                if (n[i] > 0) {
                    lc.mean[i] /= static_cast<double>(n[i]);
                }
            }
            lc.composite = composite_for(lc.mean, defined, rep.anchors);
            rep.marginals.push_back(lc);
        }
    }
    return rep;
}

struct SliceProfile {
    std::string scope;
    ResponseMatrix matrix;
    DesirabilityReport report;
};

/// Restricts the matrix to the fixed factor levels and recomputes anchors and
/// composites inside that slice.
inline SliceProfile slice_profile(const ResponseMatrix& m, const std::vector<std::pair<Factor, LevelIndex>>& fixed,
                                  const DesirabilitySpec& spec = {})
{
    std::string scope;
    for (const auto& [f, l] : fixed) {
        if (l >= m.level_count(f)) {
            throw DataError("slice level out of range for " + std::string(factor_name(f)));
        }
        scope += (scope.empty() ? "" : ";") + std::string(factor_name(f)) + "=" + m.levels(f)[l];
    }
    ResponseMatrix sub = m.filter(fixed);
    if (sub.size() == 0) {
        throw DataError("slice " + scope + " selects no rows");
    }
    SliceProfile out{scope.empty() ? "overall" : scope, sub, {}};
    out.report = desirability_rank(out.matrix, spec);
    return out;
}

} // namespace gridflow::analysis
