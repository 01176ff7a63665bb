#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gsl/gsl_cdf.h>

#include "gridflow/analysis/matrix.hpp"

namespace oracle {

using gridflow::analysis::factor_count;
using gridflow::analysis::LevelIndex;
using gridflow::analysis::ResponseMatrix;

/// Term of the reference model: a main effect (a == b) or an interaction.
struct Term {
    std::size_t a;
    std::size_t b;
};

inline std::vector<Term> model_terms()
{
    std::vector<Term> t;
    for (std::size_t a = 0; a < factor_count; ++a) t.push_back({a, a});
    for (std::size_t a = 0; a < factor_count; ++a)
        for (std::size_t b = a + 1; b < factor_count; ++b) t.push_back({a, b});
    return t;
}

/// Sum-to-zero contrast column j (0 <= j < levels-1) for level l.
inline double contrast(std::size_t l, std::size_t j, std::size_t levels)
{
    if (l == j) return 1.0;
    if (l == levels - 1) return -1.0;
    return 0.0;
}

inline std::vector<Eigen::VectorXd> term_columns(const ResponseMatrix& m, const Term& t)
{
    const auto& lv = m.all_levels();
    const std::size_t n = m.size();
    std::vector<Eigen::VectorXd> cols;
    auto level = [&](std::size_t row, std::size_t f) { return static_cast<std::size_t>(m.rows()[row].level[f]); };
    if (t.a == t.b) {
        for (std::size_t j = 0; j + 1 < lv[t.a].size(); ++j) {
            Eigen::VectorXd c(n);
            for (std::size_t r = 0; r < n; ++r) c[r] = contrast(level(r, t.a), j, lv[t.a].size());
            cols.push_back(c);
        }
    } else {
        for (std::size_t i = 0; i + 1 < lv[t.a].size(); ++i)
            for (std::size_t j = 0; j + 1 < lv[t.b].size(); ++j) {
                Eigen::VectorXd c(n);
                for (std::size_t r = 0; r < n; ++r)
                    c[r] = contrast(level(r, t.a), i, lv[t.a].size()) * contrast(level(r, t.b), j, lv[t.b].size());
                cols.push_back(c);
            }
    }
    return cols;
}

/// Residual sum of squares of the least-squares fit on the given terms.
inline double rss(const ResponseMatrix& m, std::size_t response, const std::vector<Term>& terms)
{
    const std::size_t n = m.size();
    std::vector<Eigen::VectorXd> cols{Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n))};
    for (const auto& t : terms) {
        for (auto& c : term_columns(m, t)) cols.push_back(std::move(c));
    }
    Eigen::MatrixXd X(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = cols[j];
    Eigen::VectorXd y(n);
    for (std::size_t r = 0; r < n; ++r) y[static_cast<Eigen::Index>(r)] = m.rows()[r].y[response];
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    return (y - X * beta).squaredNorm();
}

struct TermResult {
    double df;
    double ss;
    double f;
    double p;
};

struct Fit {
    std::vector<TermResult> terms;
    double rss_full;
    double df_residual;
};

/// Per-term extra sum of squares of the full model against the model
/// without that term, F against the full model's residual mean square.
inline Fit reference_fit(const ResponseMatrix& m, std::size_t response)
{
    const auto terms = model_terms();
    Fit fit;
    fit.rss_full = rss(m, response, terms);
    double p_model = 1.0;
    for (const auto& t : terms) p_model += static_cast<double>(term_columns(m, t).size());
    fit.df_residual = static_cast<double>(m.size()) - p_model;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::vector<Term> reduced;
        for (std::size_t j = 0; j < terms.size(); ++j)
            if (j != k) reduced.push_back(terms[j]);
        TermResult r;
        r.df = static_cast<double>(term_columns(m, terms[k]).size());
        r.ss = rss(m, response, reduced) - fit.rss_full;
        r.f = (r.ss / r.df) / (fit.rss_full / fit.df_residual);
        r.p = gsl_cdf_fdist_Q(r.f, r.df, fit.df_residual);
        fit.terms.push_back(r);
    }
    return fit;
}

/// Balanced matrix drawn from a known linear model with random main effects,
/// a few random interactions and Gaussian noise.
inline ResponseMatrix synthetic(std::uint32_t seed, const std::array<std::size_t, factor_count>& levels,
                                std::size_t reps, double noise_sd)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<std::vector<std::string>, factor_count> labels;
    std::array<std::vector<double>, factor_count> main;
    for (std::size_t f = 0; f < factor_count; ++f) {
        for (std::size_t l = 0; l < levels[f]; ++l) {
            labels[f].push_back("L" + std::to_string(l));
            main[f].push_back(3.0 * normal(gen) * (f == 4 ? 0.0 : 1.0));
        }
    }
    // interaction of factors 0 and 5, plus a weak one of 1 and 2
    std::vector<double> inter05(levels[0] * levels[5]), inter12(levels[1] * levels[2]);
    for (auto& v : inter05) v = 2.0 * normal(gen);
    for (auto& v : inter12) v = 0.3 * normal(gen);

    std::vector<ResponseMatrix::Row> rows;
    std::array<std::size_t, factor_count> idx{};
    std::uint64_t scenario = 0;
    for (;;) {
        for (std::size_t r = 0; r < reps; ++r) {
            ResponseMatrix::Row row;
            row.scenario_id = scenario;
            double mu = 10.0;
            for (std::size_t f = 0; f < factor_count; ++f) {
                row.level[f] = static_cast<LevelIndex>(idx[f]);
                mu += main[f][idx[f]];
            }
            mu += inter05[idx[0] * levels[5] + idx[5]] + inter12[idx[1] * levels[2] + idx[2]];
            for (std::size_t k = 0; k < gridflow::analysis::response_count; ++k) {
                row.y[k] = (k + 1.0) * mu + noise_sd * normal(gen);
            }
            row.any_exited = true;
            rows.push_back(row);
        }
        ++scenario;
        std::size_t f = factor_count;
        while (f > 0) {
            --f;
            if (++idx[f] < levels[f]) break;
            idx[f] = 0;
            if (f == 0) return ResponseMatrix::from_parts(labels, rows);
        }
    }
}

/// Ten layouts of at most 200 rows each.
inline std::vector<ResponseMatrix> synthetic_suite()
{
    const std::array<std::array<std::size_t, factor_count>, 10> layouts{{
        {2, 2, 2, 2, 2, 2},
        {3, 2, 2, 2, 2, 2},
        {2, 3, 2, 2, 2, 2},
        {2, 2, 2, 3, 2, 2},
        {2, 2, 2, 2, 3, 2},
        {2, 2, 2, 2, 2, 3},
        {3, 2, 2, 2, 2, 2},
        {2, 2, 3, 2, 2, 2},
        {2, 2, 2, 2, 2, 2},
        {2, 2, 2, 2, 2, 2},
    }};
    const std::array<std::size_t, 10> reps{2, 2, 2, 2, 2, 2, 2, 2, 3, 3};
    std::vector<ResponseMatrix> out;
    for (std::size_t i = 0; i < layouts.size(); ++i) {
        out.push_back(synthetic(static_cast<std::uint32_t>(100 + i), layouts[i], reps[i], 1.0 + 0.5 * i));
    }
    return out;
}

inline double relative_error(double got, double want)
{
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

} // namespace oracle
