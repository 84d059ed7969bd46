#pragma once

#include "sigsim/controller.hpp"
#include "sigsim/scenario.hpp"
#include "sigsim/sensing.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sigsim {

/// A driver's response to the current amber/red interval, kept until green.
enum class StopDecision { Undecided, Stop, Go };

struct Vehicle {
    std::int64_t id = 0;
    /// Unwrapped distance of the front bumper along the lane loop; the stop
    /// line sits at every multiple of the loop length.
    double odometer_m = 0.0;
    double speed_mps = 0.0;
    double length_m = 4.643;
    StopDecision decision = StopDecision::Undecided;
};

/// One directional lane: a closed loop through the intersection. Vehicles are
/// kept in ring order, so the leader of vehicles[i] is vehicles[i + 1] and the
/// last vehicle follows the first one around the loop.
struct Lane {
    std::string id;
    Road road = Road::A;
    double length_m = 0.0;
    std::vector<Vehicle> vehicles;

    double position(const Vehicle& v) const;
    std::int64_t laps(const Vehicle& v) const;
    double distance_to_stop_line(const Vehicle& v) const;
    /// Bumper-to-bumper gap to the leader; nullopt for a lone vehicle.
    std::optional<double> leader_gap(std::size_t index) const;
};

/// What a driver sees of the signal for its own road.
struct SignalView {
    Indication indication = Indication::Green;
    double distance_to_stop_line_m = 0.0;
    StopDecision decision = StopDecision::Undecided;
};

/// Stop-or-go for the current non-green interval. An undecided driver stops if
/// it can within comfortable deceleration (amber) or emergency deceleration
/// (red); the choice then sticks, except that a driver going on amber still
/// stops under red when emergency braking allows. Green clears the decision.
StopDecision update_stop_decision(const VehicleDynamics& dynamics, double speed_mps,
                                  const SignalView& signal);

/// Speed the driver wants next: the least of the speed limit, the
/// steady-state speed for the gap to the leader, and, when stopping, a
/// comfortable braking profile that halts short of the stop line.
double desired_speed(const VehicleDynamics& dynamics, const FlowModelParams& flow_model,
                     double speed_mps, std::optional<double> leader_gap_m,
                     const SignalView& signal, double dt);

/// Per-vehicle speed samples, one every `interval_s`.
struct SpeedTrace {
    double interval_s = 0.1;
    std::vector<double> times_s;
    std::vector<std::int64_t> vehicle_ids;
    std::vector<std::vector<double>> speeds_mps; ///< [vehicle][sample]

    bool empty() const noexcept;
    std::size_t sample_count() const noexcept { return times_s.size(); }
};

struct CountRecord {
    double time_s = 0.0;
    std::string lane_id;
    TrackId track_id = 0;
    std::int64_t lane_count = 0;
};

/// Safety bookkeeping, checked every step.
struct SafetyStats {
    double min_gap_m = 0.0; ///< smallest bumper-to-bumper gap seen (+inf if none)
    std::int64_t red_crossings = 0;
    std::int64_t max_simultaneous_greens = 0;
    double min_green_separation_s = 0.0; ///< +inf until the first handover
    bool lane_counts_constant = true;

    bool ok(double required_separation_s) const noexcept {
        return min_gap_m >= 0.0 && red_crossings == 0 && max_simultaneous_greens <= 1 &&
               min_green_separation_s >= required_separation_s - 1e-9 && lane_counts_constant;
    }
};

struct LaneTruth {
    std::int64_t boundary_crossings = 0; ///< true sector-boundary crossings
    std::int64_t stop_line_crossings = 0;
};

/// Two rings, four lanes, one signalized intersection.
class World {
public:
    /// Places vehicles evenly around every lane (a seeded rotation per lane);
    /// vehicles on the red road within stopping distance of the line start at
    /// rest. Throws Overcapacity when a lane cannot hold its vehicles at jam
    /// spacing.
    explicit World(const ScenarioConfig& config);

    /// Advances one time step: car following, signal, cameras, recording.
    void step();

    double time_s() const noexcept { return time_s_; }
    std::int64_t step_index() const noexcept { return step_index_; }
    const std::array<Lane, 4>& lanes() const noexcept { return lanes_; }
    const SignalController& controller() const noexcept { return controller_; }
    const ScenarioConfig& config() const noexcept { return config_; }
    const SafetyStats& safety() const noexcept { return safety_; }
    const std::array<LaneTruth, 4>& truth() const noexcept { return truth_; }
    const std::array<CounterState, 4>& counters() const noexcept { return counters_; }
    const std::array<SectorLayout, 4>& layouts() const noexcept { return layouts_; }
    const std::vector<CountRecord>& count_log() const noexcept { return count_log_; }
    std::size_t vehicle_count() const noexcept;

    /// Observations emitted by the most recent camera frame, all lanes.
    const std::vector<TrackObservation>& last_observations() const noexcept { return last_obs_; }

private:
    void move_vehicles();
    void advance_signal();
    void run_cameras();
    void check_gaps();

    ScenarioConfig config_;
    std::array<Lane, 4> lanes_;
    std::array<std::size_t, 4> initial_lane_sizes_{};
    SignalController controller_;
    std::vector<VirtualCamera> cameras_;
    std::array<SectorLayout, 4> layouts_;
    std::array<CounterState, 4> counters_;
    std::array<LaneTruth, 4> truth_{};
    std::vector<CountRecord> count_log_;
    std::vector<TrackObservation> last_obs_;
    SafetyStats safety_;
    std::array<std::optional<double>, 2> last_green_end_{};
    double time_s_ = 0.0;
    std::int64_t step_index_ = 0;
    std::int64_t steps_per_frame_ = 2;
};

/// Everything a run produces.
struct RunArtifacts {
    ScenarioConfig config;
    SpeedTrace trace;
    std::vector<ScheduleRecord> schedule_log;
    std::vector<WindowRecord> window_log;
    std::vector<CountRecord> count_log;
    SafetyStats safety;
    std::array<LaneTruth, 4> truth{};
    std::array<std::int64_t, 4> lane_counts{};
    std::int64_t steps = 0;
};

RunArtifacts run(const ScenarioConfig& config);

/// Initial split from the scenario's ring populations.
WebsterComputation initial_schedule(const ScenarioConfig& config);

} // namespace sigsim
