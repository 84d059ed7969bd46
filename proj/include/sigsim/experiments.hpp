#pragma once

#include "sigsim/metrics.hpp"
#include "sigsim/scenario.hpp"
#include "sigsim/simulator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sigsim {

/// Experiment one: equal demand at four flow levels (ring A / ring B counts
/// 22/24, 30/30, 35/37, 42/45), 15.2 simulated minutes.
std::vector<ScenarioConfig> flow_grid(std::uint64_t seed);

/// Experiment two: major/minor split 50/50 .. 80/20 (35/37, 44/30, 53/22,
/// 63/14), 15.0 simulated minutes.
std::vector<ScenarioConfig> ratio_grid(std::uint64_t seed);

struct SweepRun {
    ScenarioConfig config;
    MetricsReport report;
    SafetyStats safety;
    std::array<std::int64_t, 4> lane_counts{};
    std::array<std::int64_t, 4> initial_lane_counts{};
    double wall_seconds = 0.0;
};

/// Runs every scenario under both controllers on up to `threads` workers.
/// Results are ordered as (scenario 0 fixed, scenario 0 adaptive, ...).
/// `on_done` runs on the worker thread after each run, e.g. to write files.
std::vector<SweepRun> run_sweep(const std::vector<ScenarioConfig>& scenarios, unsigned threads,
                                const std::function<void(const SweepRun&, const RunArtifacts&)>&
                                    on_done = {});

} // namespace sigsim
