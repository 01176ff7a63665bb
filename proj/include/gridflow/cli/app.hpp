#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gridflow/analysis/compare.hpp"
#include "gridflow/analysis/desirability.hpp"
#include "gridflow/analysis/effects.hpp"
#include "gridflow/analysis/matrix.hpp"
#include "gridflow/analysis/report.hpp"
#include "gridflow/des/fault.hpp"
#include "gridflow/experiment/doe.hpp"
#include "gridflow/experiment/io.hpp"
#include "gridflow/experiment/runner.hpp"
#include "gridflow/experiment/scenario.hpp"

namespace gridflow::cli {

namespace fs = std::filesystem;

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_fault = 3;

/// Thrown for a model fault once the trace location is known.
struct TracedFault {
    std::string what;
    std::string trace;
};

inline std::ofstream open_out(const fs::path& path)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw DataError("cannot write " + path.string());
    }
    return os;
}

inline std::vector<experiment::ResultRow> load_results(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot read " + path.string());
    }
    return experiment::read_results(is);
}

inline experiment::GridFile load_grid(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("config", "cannot read " + path.string());
    }
    return experiment::parse_grid_file(is);
}

/// Base seed from GRIDFLOW_SEED, if set.
inline std::optional<std::uint64_t> env_seed()
{
    const char* v = std::getenv("GRIDFLOW_SEED");
    if (!v || !*v) {
        return std::nullopt;
    }
    return experiment::parse_count(v, "GRIDFLOW_SEED");
}

struct SimulateArgs {
    std::string config;
    std::string trr;
    std::optional<double> ia_gt;
    std::optional<double> ia_ft;
    std::optional<double> gtesb;
    std::optional<double> tlb;
    std::string tl;
    std::optional<double> horizon;
    std::optional<std::uint32_t> reps;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    bool trace = false;
    bool allow_offgrid = false;
};

inline int simulate(const SimulateArgs& a, std::ostream& out)
{
    experiment::ScenarioConfig c;
    if (!a.config.empty()) {
        const auto file = load_grid(a.config);
        const auto& g = file.grid;
        auto single = [](std::size_t n, const char* key) {
            if (n != 1) {
                throw ConfigError(key, "simulate takes a single value");
            }
        };
        single(g.trr.size(), "trr");
        single(g.ia_gt_s.size(), "ia_gt_s");
        single(g.ia_ft_s.size(), "ia_ft_s");
        single(g.gtesb.size(), "gtesb");
        single(g.tlb.size(), "tlb");
        single(g.tl_mode.size(), "tl_mode");
        c.trr = g.trr[0];
        c.ia_gt_s = g.ia_gt_s[0];
        c.ia_ft_s = g.ia_ft_s[0];
        c.gtesb = g.gtesb[0];
        c.tlb = g.tlb[0];
        c.tl_mode = g.tl_mode[0];
        c.horizon_s = file.defaults.horizon_s;
        c.replications = file.defaults.replications;
        c.base_seed = file.keys.count("base_seed") ? file.defaults.base_seed : env_seed().value_or(c.base_seed);
    } else if (auto s = env_seed()) {
        c.base_seed = *s;
    }
    if (!a.trr.empty()) c.trr = experiment::parse_rule(a.trr);
    if (!a.tl.empty()) c.tl_mode = experiment::parse_light_mode(a.tl);
    if (a.ia_gt) c.ia_gt_s = *a.ia_gt;
    if (a.ia_ft) c.ia_ft_s = *a.ia_ft;
    if (a.gtesb) c.gtesb = *a.gtesb;
    if (a.tlb) c.tlb = *a.tlb;
    if (a.horizon) c.horizon_s = *a.horizon;
    if (a.reps) c.replications = *a.reps;
    if (a.seed) c.base_seed = *a.seed;
    c.validate(a.allow_offgrid);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    experiment::ScenarioResult result{c, {}};
    for (std::uint32_t r = 0; r < c.replications; ++r) {
        const fs::path trace_path = dir / ("trace_" + std::to_string(r) + ".tsv");
        std::unique_ptr<std::ofstream> trace_file;
        if (a.trace) {
            trace_file = std::make_unique<std::ofstream>(open_out(trace_path));
        }
        try {
            result.replications.push_back(experiment::run_replication(c, r, des::TraceSink(trace_file.get())));
        } catch (const ModelFault& e) {
            if (trace_file) {
                trace_file->flush();
            }
            throw TracedFault{e.what(), a.trace ? trace_path.string()
                                                : "rerun with --trace to record " + trace_path.string()};
        }
    }
    const fs::path results = dir / "results.csv";
    auto os = open_out(results);
    experiment::write_results_header(os);
    experiment::write_scenario_rows(os, result);
    out << "wrote " << result.replications.size() << " replication(s) to " << results.string() << '\n';
    return exit_ok;
}

struct DoeArgs {
    std::string grid;
    std::string out = "doe_out";
    unsigned parallel = 0;
    bool resume = false;
    std::size_t limit = 0;
    bool allow_offgrid = false;
    std::optional<double> horizon;
    std::optional<std::uint32_t> reps;
    std::optional<std::uint64_t> seed;
};

inline int doe(const DoeArgs& a, std::ostream& out)
{
    experiment::GridFile file;
    if (!a.grid.empty()) {
        file = load_grid(a.grid);
    }
    if (!file.keys.count("base_seed")) {
        if (auto s = env_seed()) file.defaults.base_seed = *s;
    }
    if (a.horizon) file.defaults.horizon_s = *a.horizon;
    if (a.reps) file.defaults.replications = *a.reps;
    if (a.seed) file.defaults.base_seed = *a.seed;
    file.grid.validate(a.allow_offgrid);
    if (!(file.defaults.horizon_s > 0.0)) throw ConfigError("horizon_s", "must be positive");
    if (file.defaults.replications < 1) throw ConfigError("replications", "must be at least 1");

    const auto scenarios = experiment::enumerate_scenarios(file.grid, file.defaults);
    experiment::DoeOptions opts;
    opts.parallelism = a.parallel > 0 ? a.parallel : std::max(1u, std::thread::hardware_concurrency());
    opts.resume = a.resume;
    opts.limit = a.limit;
    const auto s = experiment::run_doe(scenarios, a.out, opts);
    out << "scenarios: " << s.scenarios_total << " total, " << s.scenarios_skipped << " resumed, "
        << s.scenarios_run << " run\n"
        << "results: " << s.results.string() << '\n';
    return exit_ok;
}

struct AnalyzeArgs {
    std::string results;
    std::string out = ".";
    bool effects = false;
    bool desirability = false;
    std::vector<std::string> slices;
};

inline std::vector<std::pair<analysis::Factor, analysis::LevelIndex>>
parse_slices(const analysis::ResponseMatrix& m, const std::vector<std::string>& slices)
{
    std::vector<std::pair<analysis::Factor, analysis::LevelIndex>> fixed;
    for (const auto& s : slices) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("slice", "expected key=value, got '" + s + "'");
        }
        const std::string key = experiment::trim(std::string_view(s).substr(0, eq));
        const std::string value = experiment::trim(std::string_view(s).substr(eq + 1));
        const auto f = analysis::parse_factor(key);
        if (!f) {
            throw ConfigError("slice", "unknown factor '" + key + "'");
        }
        // normalise the value to the label used in the results file
        std::string label = value;
        if (*f == analysis::Factor::Trr) {
            label = traffic::to_string(experiment::parse_rule(value, "slice"));
        } else if (*f == analysis::Factor::TlMode) {
            label = experiment::to_string(experiment::parse_light_mode(value, "slice"));
        } else {
            label = des::format_real(experiment::parse_real(value, "slice"));
        }
        const auto level = m.find_level(*f, label);
        if (!level) {
            throw ConfigError("slice", key + "=" + value + " does not occur in the results");
        }
        fixed.emplace_back(*f, *level);
    }
    return fixed;
}

inline int analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err)
{
    const auto m = analysis::ResponseMatrix::from_results(load_results(a.results));
    const auto fixed = parse_slices(m, a.slices);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    const bool want_desirability = a.desirability || !a.slices.empty();
    if (!a.effects && !want_desirability) {
        throw ConfigError("analyze", "nothing requested (use --effects, --desirability or --slice)");
    }
    if (a.effects) {
        const auto table = analysis::effects_test(m);
        const fs::path path = dir / "effects.csv";
        auto os = open_out(path);
        analysis::write_effects_csv(os, table);
        out << "wrote " << path.string() << '\n';
    }
    if (want_desirability) {
        const fs::path path = dir / (fixed.empty() ? "desirability.csv" : "slice_desirability.csv");
        auto os = open_out(path);
        analysis::write_desirability_header(os);
        const auto profile = analysis::slice_profile(m, fixed);
        for (const auto& w : profile.report.warnings) {
            err << "warning: " << w << '\n';
        }
        analysis::write_desirability_rows(os, profile.scope, profile.matrix, profile.report);
        out << "wrote " << path.string() << '\n';
    }
    return exit_ok;
}

struct ReportArgs {
    std::string results;
    std::string out = ".";
    bool compare_rules = false;
};

inline int report(const ReportArgs& a, std::ostream& out)
{
    if (!a.compare_rules) {
        throw ConfigError("report", "nothing requested (use --compare-rules)");
    }
    const auto m = analysis::ResponseMatrix::from_results(load_results(a.results));
    const auto cmp = analysis::compare_rules(m);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    {
        auto os = open_out(dir / "comparison.csv");
        analysis::write_comparison_csv(os, cmp);
    }
    {
        auto os = open_out(dir / "reductions.csv");
        analysis::write_reductions_csv(os, cmp);
    }
    {
        auto os = open_out(dir / "summary.txt");
        analysis::write_summary(os, cmp);
    }
    analysis::write_summary(out, cmp);
    return exit_ok;
}

/// Runs a command body, mapping failures to exit codes.
template <typename Body>
int guarded(Body&& body, std::ostream& err)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_usage;
    } catch (const TracedFault& e) {
        err << "model fault: " << e.what << "\ntrace: " << e.trace << '\n';
        return exit_fault;
    } catch (const ModelFault& e) {
        err << "model fault: " << e.what() << "\ntrace: rerun the scenario with simulate --trace\n";
        return exit_fault;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_usage;
    }
}

/// Parses and dispatches one command line. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Traffic network simulation and experiment toolkit", "gridflow"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run one scenario");
    s->add_option("--config", sim.config, "key = value scenario file");
    s->add_option("--trr", sim.trr, "routing rule: sd, st or lc");
    s->add_option("--ia-gt", sim.ia_gt, "GT inter-arrival mean, seconds");
    s->add_option("--ia-ft", sim.ia_ft, "FT inter-arrival mean, seconds");
    s->add_option("--gtesb", sim.gtesb, "GT exit probability at side branches");
    s->add_option("--tlb", sim.tlb, "loop-back probability");
    s->add_option("--tl", sim.tl, "light mode: sync or desync");
    s->add_option("--horizon", sim.horizon, "horizon, seconds");
    s->add_option("--reps", sim.reps, "replications");
    s->add_option("--seed", sim.seed, "base seed");
    s->add_option("--out", sim.out, "output directory");
    s->add_flag("--trace", sim.trace, "write trace_<r>.tsv per replication");
    s->add_flag("--allow-offgrid", sim.allow_offgrid, "accept non-standard factor levels");

    DoeArgs d;
    auto* dc = app.add_subcommand("doe", "run a full-factorial grid");
    dc->add_option("--grid", d.grid, "key = value grid file (default: full grid)");
    dc->add_option("--out", d.out, "output directory");
    dc->add_option("--parallel", d.parallel, "worker threads (default: all cores)");
    dc->add_flag("--resume", d.resume, "skip scenarios listed in the checkpoint");
    dc->add_option("--limit", d.limit, "run at most this many new scenarios");
    dc->add_flag("--allow-offgrid", d.allow_offgrid, "accept non-standard factor levels");
    dc->add_option("--horizon", d.horizon, "override horizon_s");
    dc->add_option("--reps", d.reps, "override replications");
    dc->add_option("--seed", d.seed, "override base_seed");

    AnalyzeArgs an;
    auto* ac = app.add_subcommand("analyze", "effects test and desirability");
    ac->add_option("--results", an.results, "results CSV")->required();
    ac->add_option("--out", an.out, "output directory");
    ac->add_flag("--effects", an.effects, "write effects.csv");
    ac->add_flag("--desirability", an.desirability, "write desirability.csv");
    ac->add_option("--slice", an.slices, "factor=level restriction (repeatable)");

    ReportArgs rp;
    auto* rc = app.add_subcommand("report", "routing rule comparison");
    rc->add_option("--results", rp.results, "results CSV")->required();
    rc->add_option("--out", rp.out, "output directory");
    rc->add_flag("--compare-rules", rp.compare_rules, "write comparison CSVs and a summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    return guarded(
        [&] {
            if (*s) return simulate(sim, out);
            if (*dc) return doe(d, out);
            if (*ac) return analyze(an, out, err);
            return report(rp, out);
        },
        err);
}

} // namespace gridflow::cli
