#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridflow/des/fault.hpp"
#include "gridflow/experiment/io.hpp"
#include "gridflow/experiment/runner.hpp"

namespace gridflow::experiment {

namespace fs = std::filesystem;

struct DoeOptions {
    unsigned parallelism = 1;
    bool resume = false;
    // run at most this many new scenarios in this invocation (0 = all)
    std::size_t limit = 0;
};

struct DoeSummary {
    std::size_t scenarios_total = 0;
    std::size_t scenarios_skipped = 0;
    std::size_t scenarios_run = 0;
    fs::path results;
    fs::path checkpoint;
};

inline void write_rows_sorted(const fs::path& path, std::vector<ResultRow> rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return a.scenario_id != b.scenario_id ? a.scenario_id < b.scenario_id : a.replication < b.replication;
    });
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        write_results_header(os);
        for (const auto& r : rows) {
            write_result_row(os, r);
        }
        if (!os) {
            throw DataError("cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

/// Runs a scenario list into `out_dir/results.csv`, recording each finished
/// scenario in `out_dir/checkpoint.txt` after its rows are flushed. With
/// `resume`, scenarios listed in the checkpoint are kept and skipped; rows of a
/// scenario that was cut off mid-write are discarded.
inline DoeSummary run_doe(const std::vector<ScenarioConfig>& scenarios, const fs::path& out_dir,
                          const DoeOptions& options)
{
    fs::create_directories(out_dir);
    DoeSummary summary;
    summary.scenarios_total = scenarios.size();
    summary.results = out_dir / "results.csv";
    summary.checkpoint = out_dir / "checkpoint.txt";

    std::set<std::uint64_t> done;
    if (options.resume && fs::exists(summary.checkpoint)) {
        std::ifstream ck(summary.checkpoint);
        done = read_checkpoint(ck, scenarios.size());
    }

    if (!done.empty()) {
        if (!fs::exists(summary.results)) {
            throw DataError("checkpoint lists completed scenarios but " + summary.results.string() + " is missing");
        }
        std::vector<ResultRow> kept;
        {
            std::ifstream is(summary.results);
            for (auto& row : read_results(is)) {
                if (done.count(row.scenario_id)) {
                    kept.push_back(row);
                }
            }
        }
        std::map<std::uint64_t, std::set<std::uint32_t>> reps;
        for (const auto& r : kept) {
            reps[r.scenario_id].insert(r.replication);
        }
        for (std::uint64_t id : done) {
            const auto& cfg = scenarios[id];
            if (reps[id].size() != cfg.replications) {
                throw DataError("checkpoint lists scenario " + std::to_string(id) +
                                " but the results file does not hold all of its replications");
            }
        }
        write_rows_sorted(summary.results, std::move(kept));
    } else {
        std::ofstream os(summary.results, std::ios::trunc);
        write_results_header(os);
        std::ofstream ck(summary.checkpoint, std::ios::trunc);
    }

    std::ofstream results(summary.results, std::ios::app);
    std::ofstream checkpoint(summary.checkpoint, std::ios::app);
    std::uint64_t max_done = done.empty() ? 0 : *done.rbegin();
    bool out_of_order = false;

    GridRunOptions grid_options;
    grid_options.parallelism = options.parallelism;
    grid_options.skip = done;
    grid_options.limit = options.limit;
    summary.scenarios_skipped = done.size();
    summary.scenarios_run = run_grid(scenarios, grid_options, [&](ScenarioResult&& result) {
        write_scenario_rows(results, result);
        results.flush();
        checkpoint << result.config.scenario_id << '\n';
        checkpoint.flush();
        if (!results || !checkpoint) {
            throw DataError("write failure in " + out_dir.string());
        }
        if (!done.empty() && result.config.scenario_id < max_done) {
            out_of_order = true;
        }
    });
    results.close();
    checkpoint.close();

    if (out_of_order) {
        std::ifstream is(summary.results);
        auto rows = read_results(is);
        is.close();
        write_rows_sorted(summary.results, std::move(rows));
    }
    return summary;
}

} // namespace gridflow::experiment
