#include "sigsim/cli.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/experiments.hpp"
#include "sigsim/flow_model.hpp"
#include "sigsim/io.hpp"
#include "sigsim/metrics.hpp"
#include "sigsim/scenario.hpp"
#include "sigsim/simulator.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace sigsim::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw InputError("cannot open '" + path + "'");
    }
    return f;
}

void write_trace(std::ostream& out, const SpeedTrace& trace) {
    out << "time_s,vehicle_id,speed_mps\n";
    for (std::size_t s = 0; s < trace.times_s.size(); ++s) {
        const std::string t = format_double(trace.times_s[s]);
        for (std::size_t v = 0; v < trace.vehicle_ids.size(); ++v) {
            out << t << ',' << trace.vehicle_ids[v] << ',' << format_double(trace.speeds_mps[v][s])
                << '\n';
        }
    }
}

void write_schedule(std::ostream& out, const std::vector<ScheduleRecord>& log) {
    out << "cycle_index,y_a,y_b,y_sum,c0_s,g_a_s,g_b_s,cycle_s\n";
    for (const auto& r : log) {
        const auto& w = r.computation;
        out << r.cycle_index << ',' << format_double(w.y_a) << ',' << format_double(w.y_b) << ','
            << format_double(w.y_sum) << ',' << format_double(w.ideal_cycle_s) << ','
            << format_double(w.green_a_s) << ',' << format_double(w.green_b_s) << ','
            << format_double(w.cycle_s) << '\n';
    }
}

void write_counts(std::ostream& out, const std::vector<CountRecord>& log) {
    out << "time_s,lane_id,track_id,lane_count\n";
    for (const auto& r : log) {
        out << format_double(r.time_s) << ',' << r.lane_id << ',' << r.track_id << ',' << r.lane_count
            << '\n';
    }
}

void write_windows(std::ostream& out, const std::vector<WindowRecord>& log) {
    out << "road,start_s,end_s,lane1_count,lane2_count,road_flow_vps,flow_ratio\n";
    for (const auto& w : log) {
        out << road_name(w.road) << ',' << format_double(w.start_time_s) << ','
            << format_double(w.end_time_s) << ',' << w.lane_counts[0] << ',' << w.lane_counts[1]
            << ',' << format_double(w.road_flow_vps) << ',' << format_double(w.flow_ratio) << '\n';
    }
}

void write_safety(std::ostream& out, const SafetyStats& s, const std::array<LaneTruth, 4>& truth,
                  double required_separation_s) {
    out << "min_gap_m = " << format_double(s.min_gap_m) << '\n'
        << "red_crossings = " << s.red_crossings << '\n'
        << "max_simultaneous_greens = " << s.max_simultaneous_greens << '\n'
        << "min_green_separation_s = " << format_double(s.min_green_separation_s) << '\n'
        << "lane_counts_constant = " << (s.lane_counts_constant ? "true" : "false") << '\n'
        << "safety_ok = " << (s.ok(required_separation_s) ? "true" : "false") << '\n';
    for (std::size_t i = 0; i < truth.size(); ++i) {
        out << "lane" << i << "_boundary_crossings = " << truth[i].boundary_crossings << '\n'
            << "lane" << i << "_stop_line_crossings = " << truth[i].stop_line_crossings << '\n';
    }
}

void print_report(std::ostream& out, const MetricsReport& r) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(3);
    out << "scenario            " << r.scenario << '\n';
    if (r.mode) {
        out << "mode                " << mode_name(*r.mode) << '\n';
    }
    out << "average_speed_kph   " << r.average_speed_kph << '\n'
        << "simulation_time_min " << r.simulation_time_min << '\n'
        << "total_time_lost_min " << r.total_time_lost_min << '\n'
        << "average_pass        " << r.average_pass << '\n'
        << "average_time_lost_s " << r.average_time_lost_s << '\n';
    out.flags(flags);
    out.precision(precision);
}

double required_separation(const ScenarioConfig& c) { return c.timing.amber_s + c.timing.all_red_s; }

void write_run_dir(const fs::path& dir, const RunArtifacts& artifacts, const MetricsReport& report,
                   bool with_trace) {
    fs::create_directories(dir);
    {
        auto f = open_out(dir / "scenario.txt");
        write_scenario(f, artifacts.config);
    }
    if (with_trace) {
        auto f = open_out(dir / "trace.csv");
        write_trace(f, artifacts.trace);
    }
    {
        auto f = open_out(dir / "schedule.csv");
        write_schedule(f, artifacts.schedule_log);
    }
    {
        auto f = open_out(dir / "counts.csv");
        write_counts(f, artifacts.count_log);
    }
    {
        auto f = open_out(dir / "windows.csv");
        write_windows(f, artifacts.window_log);
    }
    {
        auto f = open_out(dir / "safety.txt");
        write_safety(f, artifacts.safety, artifacts.truth, required_separation(artifacts.config));
    }
    {
        auto f = open_out(dir / "report.json");
        write_reports_json(f, {report});
    }
}

} // namespace

void cmd_calibrate(const std::string& sample_file, const std::optional<std::string>& params_out,
                   std::ostream& out) {
    auto in = open_in(sample_file);
    const auto samples = read_calibration_samples(in);
    const auto params = fit_speed_density(samples);
    if (params_out) {
        auto f = open_out(*params_out);
        write_flow_params(f, params);
    }
    out << "free_flow_speed_kph = " << format_double(params.free_flow_speed_kph) << '\n'
        << "jam_density_vpkm = " << format_double(params.jam_density_vpkm) << '\n'
        << "max_flow_vph = " << format_double(max_flow(params)) << '\n';
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out) {
    ScenarioConfig config = load_scenario(options.scenario_file);
    if (options.seed) {
        config.seed = *options.seed;
    }
    if (options.mode) {
        config.mode = *options.mode;
    }
    const RunArtifacts artifacts = run(config);
    const MetricsReport report = evaluate(artifacts);
    write_run_dir(options.out_dir, artifacts, report, true);
    print_report(out, report);
    if (!artifacts.safety.ok(required_separation(config))) {
        out << "safety check FAILED (see safety.txt)\n";
        return kExitInvariant;
    }
    return kExitOk;
}

CountResult cmd_count(const CountOptions& options, std::ostream& out) {
    auto in = open_in(options.track_file);
    auto observations = read_track_file(in);
    if (options.lane_id) {
        std::erase_if(observations, [&](const auto& o) { return o.lane_id != *options.lane_id; });
    }
    if (observations.empty()) {
        throw InputError("track file has no observations" +
                         (options.lane_id ? " for lane '" + *options.lane_id + "'" : std::string()));
    }
    std::stable_sort(observations.begin(), observations.end(),
                     [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });

    std::map<std::string, std::pair<SectorLayout, CounterState>> lanes;
    for (const auto& obs : observations) {
        if (!lanes.contains(obs.lane_id)) {
            SectorLayout layout{obs.lane_id, options.sector1_start_m, options.boundary_m,
                                options.sector2_end_m};
            if (!layout.valid()) {
                throw InputError("sector layout needs sector1_start < boundary < sector2_end");
            }
            lanes.emplace(obs.lane_id, std::pair{layout, CounterState(options.frame_rate_fps)});
        }
    }

    // Feed each (frame, lane) group in frame order.
    std::size_t i = 0;
    while (i < observations.size()) {
        const auto frame = observations[i].frame_index;
        std::size_t j = i;
        while (j < observations.size() && observations[j].frame_index == frame) {
            ++j;
        }
        std::map<std::string, std::vector<TrackObservation>> by_lane;
        for (std::size_t k = i; k < j; ++k) {
            by_lane[observations[k].lane_id].push_back(observations[k]);
        }
        for (auto& [lane, obs] : by_lane) {
            auto& [layout, state] = lanes.at(lane);
            update_counter(state, layout, obs, frame);
        }
        i = j;
    }

    const auto first = observations.front().frame_index;
    const auto last = observations.back().frame_index;
    const double span = static_cast<double>(last - first + 1) / options.frame_rate_fps;

    CountResult result;
    result.span_s = span;
    out << "lane_id,count,span_s,flow_vps\n";
    for (const auto& [lane, entry] : lanes) {
        const auto count = entry.second.count();
        result.count += count;
        out << lane << ',' << count << ',' << format_double(span) << ','
            << format_double(realtime_flow(MeasurementWindow{lane, 0.0, span, count})) << '\n';
    }
    result.flow_vps = realtime_flow(MeasurementWindow{"total", 0.0, span, result.count});
    out << "total," << result.count << ',' << format_double(span) << ','
        << format_double(result.flow_vps) << '\n';
    return result;
}

void cmd_compare(const std::string& fixed_reports, const std::string& adaptive_reports,
                 const std::optional<fs::path>& out_dir, std::ostream& out) {
    auto fixed_in = open_in(fixed_reports);
    auto adaptive_in = open_in(adaptive_reports);
    const auto rows = compare_all(read_reports_json(fixed_in), read_reports_json(adaptive_in));
    write_comparison_csv(out, rows);
    if (out_dir) {
        fs::create_directories(*out_dir);
        auto f = open_out(*out_dir / "comparison.csv");
        write_comparison_csv(f, rows);
    }
}

int cmd_sweep(const SweepOptions& options, std::ostream& out) {
    const unsigned threads =
        options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    fs::create_directories(options.out_dir);

    auto on_done = [&](const SweepRun& r, const RunArtifacts& artifacts) {
        write_run_dir(options.out_dir / (r.config.label + "_" + std::string(mode_name(r.config.mode))),
                      artifacts, r.report, options.write_traces);
    };

    bool all_safe = true;
    std::vector<MetricsReport> fixed_all;
    std::vector<MetricsReport> adaptive_all;
    const std::vector<std::pair<std::string, std::vector<ScenarioConfig>>> grids = {
        {"figure_flow.csv", flow_grid(options.seed)},
        {"figure_ratio.csv", ratio_grid(options.seed)},
    };
    for (const auto& [figure, grid] : grids) {
        const auto runs = run_sweep(grid, threads, on_done);
        std::vector<MetricsReport> fixed;
        std::vector<MetricsReport> adaptive;
        for (const auto& r : runs) {
            all_safe = all_safe && r.safety.ok(required_separation(r.config)) &&
                       r.lane_counts == r.initial_lane_counts;
            (r.config.mode == ControllerMode::Fixed ? fixed : adaptive).push_back(r.report);
        }
        const auto rows = compare_all(fixed, adaptive);
        auto f = open_out(options.out_dir / figure);
        write_comparison_csv(f, rows);
        out << "# " << figure << '\n';
        write_comparison_csv(out, rows);
        fixed_all.insert(fixed_all.end(), fixed.begin(), fixed.end());
        adaptive_all.insert(adaptive_all.end(), adaptive.begin(), adaptive.end());
    }
    {
        auto f = open_out(options.out_dir / "reports_fixed.json");
        write_reports_json(f, fixed_all);
    }
    {
        auto f = open_out(options.out_dir / "reports_adaptive.json");
        write_reports_json(f, adaptive_all);
    }
    if (!all_safe) {
        out << "safety check FAILED in at least one run\n";
        return kExitInvariant;
    }
    return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-ring signalized intersection simulator with adaptive Webster control"};
    app.require_subcommand(1);

    std::string sample_file;
    std::optional<std::string> params_out;
    auto* calibrate = app.add_subcommand("calibrate", "Fit the speed-density line to samples");
    calibrate->add_option("samples", sample_file, "density_veh_per_km,speed_kph rows")->required();
    calibrate->add_option("--out", params_out, "Write the parameter file here");

    SimulateOptions sim;
    std::string mode_text;
    std::uint64_t seed_value = 0;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario");
    simulate->add_option("--scenario", sim.scenario_file, "Scenario file (key = value)")->required();
    auto* seed_opt = simulate->add_option("--seed", seed_value, "Override the scenario seed");
    auto* mode_opt = simulate->add_option("--mode", mode_text, "fixed | adaptive")
                         ->check(CLI::IsMember({"fixed", "adaptive"}));
    simulate->add_option("--out", sim.out_dir, "Output directory");

    CountOptions count;
    std::string lane;
    auto* count_cmd = app.add_subcommand("count", "Replay a track file through the sector counter");
    count_cmd->add_option("tracks", count.track_file, "frame_index,track_id,lane_id,position_m rows")
        ->required();
    auto* lane_opt = count_cmd->add_option("--lane", lane, "Only count this lane");
    count_cmd->add_option("--sector1-start", count.sector1_start_m, "Sector 1 start (m)");
    count_cmd->add_option("--boundary", count.boundary_m, "Sector boundary (m)");
    count_cmd->add_option("--sector2-end", count.sector2_end_m, "Sector 2 end (m)");
    count_cmd->add_option("--fps", count.frame_rate_fps, "Camera frame rate")
        ->check(CLI::PositiveNumber);

    std::string fixed_file;
    std::string adaptive_file;
    std::optional<std::string> compare_out;
    auto* compare_cmd = app.add_subcommand("compare", "Percent time saved per scenario");
    compare_cmd->add_option("fixed", fixed_file, "Fixed-time report JSON")->required();
    compare_cmd->add_option("adaptive", adaptive_file, "Adaptive report JSON")->required();
    compare_cmd->add_option("--out", compare_out, "Also write comparison.csv here");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run both experiment grids under both controllers");
    sweep_cmd->add_option("--out", sweep.out_dir, "Output directory");
    sweep_cmd->add_option("--seed", sweep.seed, "Seed for every scenario");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0: all cores)");
    sweep_cmd->add_flag("--traces", sweep.write_traces, "Also write per-run speed traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (*calibrate) {
            cmd_calibrate(sample_file, params_out, out);
        } else if (*simulate) {
            if (*seed_opt) sim.seed = seed_value;
            if (*mode_opt) sim.mode = parse_mode(mode_text);
            return cmd_simulate(sim, out);
        } else if (*count_cmd) {
            if (*lane_opt) count.lane_id = lane;
            cmd_count(count, out);
        } else if (*compare_cmd) {
            cmd_compare(fixed_file, adaptive_file,
                        compare_out ? std::optional<fs::path>(*compare_out) : std::nullopt, out);
        } else if (*sweep_cmd) {
            return cmd_sweep(sweep, out);
        }
    } catch (const InvariantBreach& e) {
        err << "invariant breach: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace sigsim::cli
