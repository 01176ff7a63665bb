#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "gridflow/experiment/scenario.hpp"
#include "gridflow/traffic/simulation.hpp"

namespace gridflow::experiment {

struct ScenarioResult {
    ScenarioConfig config;
    // one entry per replication, ordered by replication index
    std::vector<traffic::ReplicationOutcome> replications;
};

/// Replication r of a scenario draws every stream from
/// (base_seed, scenario_id, r, purpose), so it is independent of execution order.
inline traffic::ReplicationOutcome run_replication(const ScenarioConfig& config, std::uint32_t replication,
                                                   des::TraceSink trace = {})
{
    traffic::Replication rep(config.model(), config.base_seed, config.scenario_id, replication, trace);
    return rep.run();
}

inline ScenarioResult run_scenario(const ScenarioConfig& config)
{
    ScenarioResult result{config, {}};
    result.replications.reserve(config.replications);
    for (std::uint32_t r = 0; r < config.replications; ++r) {
        result.replications.push_back(run_replication(config, r));
    }
    return result;
}

struct GridRunOptions {
    unsigned parallelism = 1;
    // scenario ids already completed; they are not run again
    std::set<std::uint64_t> skip;
    // stop after this many scenarios have been emitted (0 = no limit)
    std::size_t limit = 0;
};

/// Runs every scenario not in `options.skip` exactly once and hands each result
/// to `sink` in scenario order, whatever order the workers finish in. The sink
/// runs on the calling thread's side of a mutex, one result at a time.
inline std::size_t run_grid(const std::vector<ScenarioConfig>& scenarios, const GridRunOptions& options,
                            const std::function<void(ScenarioResult&&)>& sink)
{
    std::vector<const ScenarioConfig*> todo;
    for (const auto& s : scenarios) {
        if (!options.skip.count(s.scenario_id)) {
            todo.push_back(&s);
        }
    }
    std::sort(todo.begin(), todo.end(),
              [](const ScenarioConfig* a, const ScenarioConfig* b) { return a->scenario_id < b->scenario_id; });
    if (options.limit > 0 && todo.size() > options.limit) {
        todo.resize(options.limit);
    }

    std::mutex mu;
    std::condition_variable slot_freed;
    std::map<std::size_t, ScenarioResult> finished;
    std::size_t next_emit = 0;
    std::atomic<std::size_t> next_task{0};
    std::exception_ptr failure;
    // bounds memory when one slow scenario holds back the emitter
    const std::size_t window = std::max<std::size_t>(4, 4 * std::max(1u, options.parallelism));

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next_task.fetch_add(1);
            if (i >= todo.size()) {
                return;
            }
            {
                std::unique_lock lock(mu);
                slot_freed.wait(lock, [&] { return failure || i < next_emit + window; });
                if (failure) {
                    return;
                }
            }
            ScenarioResult result;
            try {
                result = run_scenario(*todo[i]);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                slot_freed.notify_all();
                return;
            }
            std::lock_guard lock(mu);
            finished.emplace(i, std::move(result));
            while (!failure && !finished.empty() && finished.begin()->first == next_emit) {
                try {
                    sink(std::move(finished.begin()->second));
                } catch (...) {
                    failure = std::current_exception();
                }
                finished.erase(finished.begin());
                ++next_emit;
            }
            slot_freed.notify_all();
        }
    };

    const unsigned n = std::max(1u, options.parallelism);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return next_emit;
}

} // namespace gridflow::experiment
