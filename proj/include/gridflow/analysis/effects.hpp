#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "gridflow/analysis/matrix.hpp"
#include "gridflow/des/fault.hpp"

namespace gridflow::analysis {

/// One row of an effects table: a main effect (second == first) or a two-way
/// interaction.
struct EffectTerm {
    Factor first = Factor::Trr;
    Factor second = Factor::Trr;
    double df = 0.0;
    double ss = 0.0;
    double f = 0.0;
    double p = 1.0;

    bool is_interaction() const noexcept { return first != second; }

    std::string name() const
    {
        if (!is_interaction()) {
            return std::string(factor_name(first));
        }
        return std::string(factor_name(first)) + "*" + std::string(factor_name(second));
    }
};

struct ResponseEffects {
    Response response = Response::TotalTime;
    std::vector<EffectTerm> terms;
    double ss_total = 0.0;
    double ss_residual = 0.0;
    double df_residual = 0.0;

    const EffectTerm& term(Factor a, Factor b) const
    {
        for (const auto& t : terms) {
            if ((t.first == a && t.second == b) || (t.first == b && t.second == a)) {
                return t;
            }
        }
        throw DataError("no such effects term");
    }
    const EffectTerm& term(Factor a) const { return term(a, a); }
};

struct EffectsTable {
    std::vector<ResponseEffects> responses;

    const ResponseEffects& at(Response r) const
    {
        for (const auto& e : responses) {
            if (e.response == r) {
                return e;
            }
        }
        throw DataError("no such response");
    }
};

/// Upper tail of the F distribution.
inline double f_upper_tail(double f, double df1, double df2)
{
    if (!(f > 0.0)) {
        return 1.0;
    }
    if (std::isinf(f)) {
        return 0.0;
    }
    const boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

namespace detail {

/// Means over the rows grouped by one or two factors' levels.
class CellMeans {
public:
    CellMeans(const ResponseMatrix& m, std::size_t response, std::size_t a, std::size_t b)
        : a_(a), b_(b), stride_(m.all_levels()[b].size())
    {
        const std::size_t cells = m.all_levels()[a].size() * stride_;
        sum_.assign(cells, 0.0);
        count_.assign(cells, 0);
        for (const auto& r : m.rows()) {
            const std::size_t c = index(r);
            sum_[c] += r.y[response];
            ++count_[c];
        }
        for (std::size_t c = 0; c < cells; ++c) {
            if (count_[c] > 0) {
                sum_[c] /= static_cast<double>(count_[c]);
            }
        }
    }

    double mean(const ResponseMatrix::Row& r) const { return sum_[index(r)]; }

    template <typename F>
    void for_each_cell(F&& fn) const
    {
        for (std::size_t c = 0; c < sum_.size(); ++c) {
            fn(c / stride_, c % stride_, sum_[c], count_[c]);
        }
    }

private:
    std::size_t index(const ResponseMatrix::Row& r) const { return r.level[a_] * stride_ + r.level[b_]; }

    std::size_t a_;
    std::size_t b_;
    std::size_t stride_;
    std::vector<double> sum_;
    std::vector<std::size_t> count_;
};

} // namespace detail

/// Fixed-effects ANOVA with all main effects and all two-way interactions of
/// the six categorical factors, fitted separately for each response.
///
/// The matrix must be a balanced full factorial with at least two rows per
/// cell. In that layout the effect estimates are orthogonal, so each term's
/// sum of squares follows from marginal and two-way cell means, and the
/// residual is taken from the fitted values directly.
inline EffectsTable effects_test(const ResponseMatrix& m)
{
    const auto per_cell = m.replicates_per_cell();
    if (!per_cell) {
        throw DataError("effects test needs a balanced full-factorial matrix (every level combination present "
                        "with the same number of replications)");
    }
    if (*per_cell < 2) {
        throw DataError("effects test needs at least 2 replications per cell");
    }

    const auto& levels = m.all_levels();
    const double n_rows = static_cast<double>(m.size());
    std::vector<std::pair<std::size_t, std::size_t>> term_factors;
    for (std::size_t a = 0; a < factor_count; ++a) {
        term_factors.emplace_back(a, a);
    }
    for (std::size_t a = 0; a < factor_count; ++a) {
        for (std::size_t b = a + 1; b < factor_count; ++b) {
            term_factors.emplace_back(a, b);
        }
    }

    EffectsTable table;
    for (Response resp : all_responses) {
        const std::size_t ri = static_cast<std::size_t>(resp);
        double grand = 0.0;
        for (const auto& r : m.rows()) {
            grand += r.y[ri];
        }
        grand /= n_rows;

        std::vector<detail::CellMeans> mains;
        for (std::size_t a = 0; a < factor_count; ++a) {
            mains.emplace_back(m, ri, a, a);
        }
        std::map<std::pair<std::size_t, std::size_t>, detail::CellMeans> pairs;
        for (const auto& [a, b] : term_factors) {
            if (a != b) {
                pairs.emplace(std::pair{a, b}, detail::CellMeans(m, ri, a, b));
            }
        }

        ResponseEffects out;
        out.response = resp;
        double df_model = 0.0;
        for (const auto& [a, b] : term_factors) {
            EffectTerm t;
            t.first = all_factors[a];
            t.second = all_factors[b];
            const double la = static_cast<double>(levels[a].size());
            const double lb = static_cast<double>(levels[b].size());
            if (a == b) {
                t.df = la - 1.0;
                mains[a].for_each_cell([&](std::size_t i, std::size_t j, double mean, std::size_t n) {
                    if (i == j && n > 0) {
                        t.ss += static_cast<double>(n) * (mean - grand) * (mean - grand);
                    }
                });
            } else {
                t.df = (la - 1.0) * (lb - 1.0);
                const auto& cell = pairs.at({a, b});
                // level means of each factor, by level index
                std::vector<double> ma(levels[a].size()), mb(levels[b].size());
                mains[a].for_each_cell([&](std::size_t i, std::size_t j, double mean, std::size_t) {
                    if (i == j) ma[i] = mean;
                });
                mains[b].for_each_cell([&](std::size_t i, std::size_t j, double mean, std::size_t) {
                    if (i == j) mb[i] = mean;
                });
                cell.for_each_cell([&](std::size_t i, std::size_t j, double mean, std::size_t n) {
                    const double d = mean - ma[i] - mb[j] + grand;
                    t.ss += static_cast<double>(n) * d * d;
                });
            }
            df_model += t.df;
            out.terms.push_back(t);
        }

        for (const auto& r : m.rows()) {
            double fitted = grand;
            for (std::size_t a = 0; a < factor_count; ++a) {
                fitted += mains[a].mean(r) - grand;
            }
            for (const auto& [key, cell] : pairs) {
                fitted += cell.mean(r) - mains[key.first].mean(r) - mains[key.second].mean(r) + grand;
            }
            const double e = r.y[ri] - fitted;
            const double d = r.y[ri] - grand;
            out.ss_residual += e * e;
            out.ss_total += d * d;
        }
        out.df_residual = n_rows - 1.0 - df_model;
        if (out.df_residual <= 0.0) {
            throw DataError("no residual degrees of freedom left for the effects test");
        }

        // sums of squares below this are rounding noise in a constant response
        const double noise = 1e-12 * std::max(out.ss_total, std::numeric_limits<double>::min());
        const double ms_residual = out.ss_residual / out.df_residual;
        for (auto& t : out.terms) {
            if (t.df == 0.0 || t.ss <= noise) {
                t.f = 0.0;
                t.p = 1.0;
            } else if (out.ss_residual <= noise) {
                t.f = std::numeric_limits<double>::infinity();
                t.p = 0.0;
            } else {
                t.f = (t.ss / t.df) / ms_residual;
                t.p = f_upper_tail(t.f, t.df, out.df_residual);
            }
        }
        table.responses.push_back(std::move(out));
    }
    return table;
}

} // namespace gridflow::analysis
