#include "sigsim/simulator.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sigsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::array<const char*, 4> kLaneIds = {"A_cw", "A_ccw", "B_cw", "B_ccw"};

/// Number of times the point `mark` (mod loop length) lies in (from, to].
std::int64_t crossings(double from, double to, double mark, double length) {
    return static_cast<std::int64_t>(std::floor((to - mark) / length) -
                                     std::floor((from - mark) / length));
}

} // namespace

double Lane::position(const Vehicle& v) const {
    return v.odometer_m - static_cast<double>(laps(v)) * length_m;
}

std::int64_t Lane::laps(const Vehicle& v) const {
    return static_cast<std::int64_t>(std::floor(v.odometer_m / length_m));
}

double Lane::distance_to_stop_line(const Vehicle& v) const {
    return length_m - position(v);
}

std::optional<double> Lane::leader_gap(std::size_t index) const {
    const std::size_t n = vehicles.size();
    if (n < 2) {
        return std::nullopt;
    }
    const auto& self = vehicles[index];
    if (index + 1 < n) {
        const auto& leader = vehicles[index + 1];
        return leader.odometer_m - leader.length_m - self.odometer_m;
    }
    const auto& leader = vehicles.front();
    return leader.odometer_m + length_m - leader.length_m - self.odometer_m;
}

StopDecision update_stop_decision(const VehicleDynamics& dynamics, double speed_mps,
                                  const SignalView& signal) {
    if (signal.indication == Indication::Green) {
        return StopDecision::Undecided;
    }
    const double d = signal.distance_to_stop_line_m;
    const double v2 = speed_mps * speed_mps;
    switch (signal.decision) {
    case StopDecision::Stop:
        return StopDecision::Stop;
    case StopDecision::Go:
        if (signal.indication == Indication::Red && v2 / (2.0 * dynamics.emergency_decel_mps2) <= d) {
            return StopDecision::Stop;
        }
        return StopDecision::Go;
    case StopDecision::Undecided:
        break;
    }
    const double decel = signal.indication == Indication::Amber ? dynamics.comfort_decel_mps2
                                                                : dynamics.emergency_decel_mps2;
    return v2 / (2.0 * decel) <= d ? StopDecision::Stop : StopDecision::Go;
}

double desired_speed(const VehicleDynamics& dynamics, const FlowModelParams& flow_model,
                     double speed_mps, std::optional<double> leader_gap_m,
                     const SignalView& signal, double dt) {
    double v = dynamics.speed_limit_mps();
    if (leader_gap_m) {
        v = std::min(v, kph_to_mps(speed_for_gap(flow_model, *leader_gap_m, dynamics.length_m)));
    }
    if (update_stop_decision(dynamics, speed_mps, signal) == StopDecision::Stop) {
        const double target = std::max(signal.distance_to_stop_line_m - dynamics.stop_margin_m, 0.0);
        const double stop_speed =
            std::min(std::sqrt(2.0 * dynamics.comfort_decel_mps2 * target), target / dt);
        v = std::min(v, stop_speed);
    }
    return std::max(v, 0.0);
}

bool SpeedTrace::empty() const noexcept {
    return speeds_mps.empty() || times_s.empty();
}

WebsterComputation initial_schedule(const ScenarioConfig& config) {
    try {
        return fixed_time_schedule(config.ring_vehicles, config.flow_model, config.ring_length_m,
                                   config.timing);
    } catch (const BothZero&) {
        // Empty intersection: minimum greens on both roads.
        WebsterComputation w;
        w.lost_time_s = config.timing.lost_time_s();
        w.green_a_s = config.timing.min_green_s;
        w.green_b_s = config.timing.min_green_s;
        w.cycle_s = w.green_a_s + w.green_b_s + w.lost_time_s;
        w.ideal_cycle_s = w.cycle_s;
        return w;
    }
}

namespace {

ScenarioConfig validated(const ScenarioConfig& config) {
    config.validate();
    return config;
}

} // namespace

World::World(const ScenarioConfig& config)
    : config_(validated(config)),
      controller_(config_.mode, config_.timing, max_flow(config_.flow_model),
                  initial_schedule(config_)),
      steps_per_frame_(config_.steps_per_frame()) {
    safety_.min_gap_m = kInf;
    safety_.min_green_separation_s = kInf;

    const auto populations = config_.lane_vehicles();
    const double jam_spacing =
        config_.vehicle.length_m + std::max(jam_gap(config_.flow_model, config_.vehicle.length_m), 0.0);
    const double limit = config_.vehicle.speed_limit_mps();
    const double stop_zone = limit * limit / (2.0 * config_.vehicle.comfort_decel_mps2);
    Rng placement(config_.seed, 0xC0FFEE);

    std::int64_t next_id = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        Lane& lane = lanes_[i];
        lane.id = kLaneIds[i];
        lane.road = i < 2 ? Road::A : Road::B;
        lane.length_m = config_.ring_length_m[i / 2];
        const std::int64_t n = populations[i];
        if (static_cast<double>(n) * jam_spacing > lane.length_m) {
            std::ostringstream msg;
            msg << "lane " << lane.id << " cannot hold " << n << " vehicles on " << lane.length_m
                << " m (jam spacing " << jam_spacing << " m)";
            throw Overcapacity(msg.str());
        }
        const double spacing = n > 0 ? lane.length_m / static_cast<double>(n) : lane.length_m;
        const double offset = placement.uniform() * spacing;
        const double free_speed = std::min(
            limit, kph_to_mps(speed_for_gap(config_.flow_model, spacing - config_.vehicle.length_m,
                                            config_.vehicle.length_m)));
        const bool red_at_start = controller_.indication_for(lane.road) != Indication::Green;
        for (std::int64_t j = 0; j < n; ++j) {
            Vehicle v;
            v.id = next_id++;
            v.length_m = config_.vehicle.length_m;
            v.odometer_m = offset + static_cast<double>(j) * spacing;
            const bool queued = red_at_start && lane.distance_to_stop_line(v) <= stop_zone;
            v.speed_mps = queued ? 0.0 : (n > 1 ? free_speed : limit);
            lane.vehicles.push_back(v);
        }
        initial_lane_sizes_[i] = lane.vehicles.size();

        VirtualCameraConfig cam;
        cam.lane_id = lane.id;
        cam.window_start_m = lane.length_m - config_.camera.window_m;
        cam.window_end_m = lane.length_m;
        cam.frame_rate_fps = config_.camera.frame_rate_fps;
        cam.dropout_probability = config_.camera.dropout_probability;
        cam.id_switch_probability = config_.camera.id_switch_probability;
        cam.rng_seed = config_.seed;
        cameras_.emplace_back(cam, i + 1);
        layouts_[i] = SectorLayout::ending_at(lane.id, lane.length_m, config_.camera.sector_length_m);
        counters_[i] = CounterState(config_.camera.frame_rate_fps);
    }
    check_gaps();
}

std::size_t World::vehicle_count() const noexcept {
    std::size_t n = 0;
    for (const auto& lane : lanes_) {
        n += lane.vehicles.size();
    }
    return n;
}

void World::step() {
    move_vehicles();
    check_gaps();
    advance_signal();
    if (step_index_ % steps_per_frame_ == 0) {
        run_cameras();
    }
}

void World::move_vehicles() {
    const double dt = config_.dt_s;
    const auto& dyn = config_.vehicle;
    std::vector<double> next_speed;
    for (std::size_t li = 0; li < 4; ++li) {
        Lane& lane = lanes_[li];
        const Indication light = controller_.indication_for(lane.road);
        const std::size_t n = lane.vehicles.size();
        next_speed.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Vehicle& v = lane.vehicles[i];
            SignalView view{light, lane.distance_to_stop_line(v), v.decision};
            v.decision = update_stop_decision(dyn, v.speed_mps, view);
            view.decision = v.decision;
            const double want =
                desired_speed(dyn, config_.flow_model, v.speed_mps, lane.leader_gap(i), view, dt);
            next_speed[i] = std::clamp(want, std::max(0.0, v.speed_mps - dyn.emergency_decel_mps2 * dt),
                                       v.speed_mps + dyn.accel_mps2 * dt);
        }
        const double boundary = layouts_[li].boundary_m;
        for (std::size_t i = 0; i < n; ++i) {
            Vehicle& v = lane.vehicles[i];
            const double before = v.odometer_m;
            v.speed_mps = next_speed[i];
            v.odometer_m += v.speed_mps * dt;
            truth_[li].boundary_crossings += crossings(before, v.odometer_m, boundary, lane.length_m);
            const auto stop_crossings = crossings(before, v.odometer_m, 0.0, lane.length_m);
            truth_[li].stop_line_crossings += stop_crossings;
            if (stop_crossings > 0 && light == Indication::Red) {
                safety_.red_crossings += stop_crossings;
            }
        }
        if (lane.vehicles.size() != initial_lane_sizes_[li]) {
            safety_.lane_counts_constant = false;
        }
    }
}

void World::check_gaps() {
    for (const Lane& lane : lanes_) {
        for (std::size_t i = 0; i < lane.vehicles.size(); ++i) {
            const auto gap = lane.leader_gap(i);
            if (!gap) {
                continue;
            }
            safety_.min_gap_m = std::min(safety_.min_gap_m, *gap);
            if (*gap < 0.0) {
                std::ostringstream msg;
                msg << "collision on lane " << lane.id << " at t=" << time_s_ << " s: vehicle "
                    << lane.vehicles[i].id << " overlaps its leader by " << -*gap << " m";
                throw CollisionError(msg.str());
            }
        }
    }
}

void World::advance_signal() {
    const auto events = controller_.advance(time_s_, config_.dt_s);
    for (const auto& [event, t] : events) {
        if (!event.road) {
            continue;
        }
        const auto r = static_cast<std::size_t>(*event.road);
        if (event.kind == SignalEventKind::GreenEnd) {
            last_green_end_[r] = t;
        } else if (event.kind == SignalEventKind::GreenStart) {
            if (const auto& other_end = last_green_end_[1 - r]) {
                safety_.min_green_separation_s = std::min(safety_.min_green_separation_s, t - *other_end);
            }
        }
    }
    ++step_index_;
    time_s_ = static_cast<double>(step_index_) * config_.dt_s;
    std::int64_t greens = 0;
    for (Road road : {Road::A, Road::B}) {
        greens += controller_.indication_for(road) == Indication::Green ? 1 : 0;
    }
    safety_.max_simultaneous_greens = std::max(safety_.max_simultaneous_greens, greens);
}

void World::run_cameras() {
    const std::int64_t frame = step_index_ / steps_per_frame_;
    last_obs_.clear();
    std::vector<VehiclePose> poses;
    for (std::size_t li = 0; li < 4; ++li) {
        const Lane& lane = lanes_[li];
        poses.clear();
        for (const Vehicle& v : lane.vehicles) {
            poses.push_back(VehiclePose{v.id, lane.laps(v), lane.position(v)});
        }
        const auto observations = cameras_[li].observe(poses, frame);
        const auto counted = update_counter(counters_[li], layouts_[li], observations, frame);
        for (TrackId id : counted) {
            count_log_.push_back(CountRecord{time_s_, lane.id, id, counters_[li].count()});
        }
        if (!counted.empty()) {
            controller_.record_count(static_cast<int>(li), static_cast<std::int64_t>(counted.size()));
        }
        last_obs_.insert(last_obs_.end(), observations.begin(), observations.end());
    }
}

RunArtifacts run(const ScenarioConfig& config) {
    World world(config);
    RunArtifacts out;
    out.config = world.config();
    const std::int64_t steps = out.config.step_count();
    const std::int64_t per_record = out.config.steps_per_record();

    const std::size_t n = world.vehicle_count();
    out.trace.interval_s = static_cast<double>(per_record) * out.config.dt_s;
    out.trace.vehicle_ids.resize(n);
    out.trace.speeds_mps.assign(n, {});
    const auto samples = static_cast<std::size_t>(steps / per_record);
    out.trace.times_s.reserve(samples);
    for (auto& series : out.trace.speeds_mps) {
        series.reserve(samples);
    }
    for (const Lane& lane : world.lanes()) {
        for (const Vehicle& v : lane.vehicles) {
            out.trace.vehicle_ids[static_cast<std::size_t>(v.id)] = v.id;
        }
    }

    for (std::int64_t s = 0; s < steps; ++s) {
        world.step();
        if (world.step_index() % per_record == 0) {
            out.trace.times_s.push_back(world.time_s());
            for (const Lane& lane : world.lanes()) {
                for (const Vehicle& v : lane.vehicles) {
                    out.trace.speeds_mps[static_cast<std::size_t>(v.id)].push_back(v.speed_mps);
                }
            }
        }
    }

    out.steps = steps;
    out.schedule_log = world.controller().schedule_log();
    out.window_log = world.controller().window_log();
    out.count_log = world.count_log();
    out.safety = world.safety();
    out.truth = world.truth();
    for (std::size_t i = 0; i < 4; ++i) {
        out.lane_counts[i] = static_cast<std::int64_t>(world.lanes()[i].vehicles.size());
    }
    return out;
}

} // namespace sigsim
