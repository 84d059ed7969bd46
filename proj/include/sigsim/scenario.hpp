#pragma once

#include "sigsim/controller.hpp"
#include "sigsim/flow_model.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace sigsim {

/// Kinematic constants shared by every driver.
struct VehicleDynamics {
    double length_m = 4.643;
    double speed_limit_kph = 60.0;
    double accel_mps2 = 2.5;
    double comfort_decel_mps2 = 3.0;
    double emergency_decel_mps2 = 6.0;
    /// Distance short of the stop line at which a stopping vehicle halts.
    double stop_margin_m = 1.0;

    double speed_limit_mps() const noexcept { return kph_to_mps(speed_limit_kph); }
};

struct CameraSettings {
    double frame_rate_fps = 5.0;
    double dropout_probability = 0.1;
    double id_switch_probability = 0.0;
    double window_m = 50.0;
    double sector_length_m = 15.0;
};

struct ScenarioConfig {
    std::string label = "scenario";
    ControllerMode mode = ControllerMode::Fixed;
    /// Index 0 is ring A (left), index 1 is ring B (right).
    std::array<std::int64_t, 2> ring_vehicles{35, 37};
    /// Vehicles on each ring's clockwise lane; unset means an even split with
    /// the odd vehicle on the clockwise lane.
    std::array<std::optional<std::int64_t>, 2> clockwise_vehicles{};
    std::array<double, 2> ring_length_m{3040.0, 3200.0};
    FlowModelParams flow_model;
    SignalTiming timing;
    VehicleDynamics vehicle;
    CameraSettings camera;
    double conflict_zone_m = 15.0;
    double duration_s = 912.0;
    double dt_s = 0.1;
    double record_interval_s = 0.1;
    double metrics_cycle_min = 3.0;
    std::uint64_t seed = 1;

    /// Vehicles on lane 0..3 (A clockwise, A counter-clockwise, B clockwise,
    /// B counter-clockwise).
    std::array<std::int64_t, 4> lane_vehicles() const;

    std::int64_t step_count() const;
    std::int64_t steps_per_frame() const;
    std::int64_t steps_per_record() const;

    /// Throws InputError describing the first invalid field.
    void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and malformed values raise ParseError with the line number.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

/// Writes every field so that parse_scenario reproduces the config.
void write_scenario(std::ostream& out, const ScenarioConfig& config);

} // namespace sigsim
