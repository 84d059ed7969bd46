#include "sigsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace sigsim {

namespace {

ScenarioConfig grid_point(const char* label, std::int64_t ring_a, std::int64_t ring_b,
                          double duration_s, std::uint64_t seed) {
    ScenarioConfig c;
    c.label = label;
    c.ring_vehicles = {ring_a, ring_b};
    c.duration_s = duration_s;
    c.seed = seed;
    return c;
}

} // namespace

std::vector<ScenarioConfig> flow_grid(std::uint64_t seed) {
    return {
        grid_point("flow_0.100", 22, 24, 912.0, seed),
        grid_point("flow_0.125", 30, 30, 912.0, seed),
        grid_point("flow_0.150", 35, 37, 912.0, seed),
        grid_point("flow_0.175", 42, 45, 912.0, seed),
    };
}

std::vector<ScenarioConfig> ratio_grid(std::uint64_t seed) {
    return {
        grid_point("ratio_50_50", 35, 37, 900.0, seed),
        grid_point("ratio_60_40", 44, 30, 900.0, seed),
        grid_point("ratio_70_30", 53, 22, 900.0, seed),
        grid_point("ratio_80_20", 63, 14, 900.0, seed),
    };
}

std::vector<SweepRun> run_sweep(const std::vector<ScenarioConfig>& scenarios, unsigned threads,
                                const std::function<void(const SweepRun&, const RunArtifacts&)>& on_done) {
    std::vector<ScenarioConfig> jobs;
    for (const auto& base : scenarios) {
        for (ControllerMode mode : {ControllerMode::Fixed, ControllerMode::Adaptive}) {
            ScenarioConfig c = base;
            c.mode = mode;
            jobs.push_back(std::move(c));
        }
    }
    std::vector<SweepRun> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const auto start = std::chrono::steady_clock::now();
                const RunArtifacts artifacts = run(jobs[i]);
                SweepRun& r = results[i];
                r.config = jobs[i];
                r.report = evaluate(artifacts);
                r.safety = artifacts.safety;
                r.lane_counts = artifacts.lane_counts;
                r.initial_lane_counts = jobs[i].lane_vehicles();
                r.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (on_done) {
                    on_done(r, artifacts);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w + 1 < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

} // namespace sigsim
