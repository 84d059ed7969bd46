#include "sigsim/scenario.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

namespace sigsim {

namespace {

/// Integer ratio a / b, or -1 when it is not within 1e-6 of an integer.
std::int64_t integer_ratio(double a, double b) {
    const double ratio = a / b;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6) {
        return -1;
    }
    return static_cast<std::int64_t>(rounded);
}

struct Field {
    std::function<void(ScenarioConfig&, std::string_view, std::size_t)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

Field real(double ScenarioConfig::*member) {
    return {[member](ScenarioConfig& c, std::string_view v, std::size_t line) {
                c.*member = parse_double(v, line);
            },
            [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

template <typename Getter>
Field real_at(Getter access) {
    return {[access](ScenarioConfig& c, std::string_view v, std::size_t line) {
                access(c) = parse_double(v, line);
            },
            [access](const ScenarioConfig& c) {
                return format_double(access(c));
            }};
}

Field count_at(std::size_t ring) {
    return {[ring](ScenarioConfig& c, std::string_view v, std::size_t line) {
                c.ring_vehicles[ring] = parse_int(v, line);
            },
            [ring](const ScenarioConfig& c) { return std::to_string(c.ring_vehicles[ring]); }};
}

Field clockwise_at(std::size_t ring) {
    return {[ring](ScenarioConfig& c, std::string_view v, std::size_t line) {
                c.clockwise_vehicles[ring] = parse_int(v, line);
            },
            [ring](const ScenarioConfig& c) {
                return c.clockwise_vehicles[ring] ? std::to_string(*c.clockwise_vehicles[ring])
                                                  : std::string();
            }};
}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = {
        {"label",
         {[](ScenarioConfig& c, std::string_view v, std::size_t line) {
              if (v.empty()) throw ParseError("label must not be empty", line);
              c.label = std::string(v);
          },
          [](const ScenarioConfig& c) { return c.label; }}},
        {"mode",
         {[](ScenarioConfig& c, std::string_view v, std::size_t line) {
              try {
                  c.mode = parse_mode(v);
              } catch (const InputError& e) {
                  throw ParseError(e.what(), line);
              }
          },
          [](const ScenarioConfig& c) { return std::string(mode_name(c.mode)); }}},
        {"vehicles_a", count_at(0)},
        {"vehicles_b", count_at(1)},
        {"vehicles_a_cw", clockwise_at(0)},
        {"vehicles_b_cw", clockwise_at(1)},
        {"ring_a_length_m", real_at([](auto& c) -> auto& { return c.ring_length_m[0]; })},
        {"ring_b_length_m", real_at([](auto& c) -> auto& { return c.ring_length_m[1]; })},
        {"free_flow_speed_kph",
         real_at([](auto& c) -> auto& { return c.flow_model.free_flow_speed_kph; })},
        {"jam_density_vpkm",
         real_at([](auto& c) -> auto& { return c.flow_model.jam_density_vpkm; })},
        {"amber_s", real_at([](auto& c) -> auto& { return c.timing.amber_s; })},
        {"all_red_s", real_at([](auto& c) -> auto& { return c.timing.all_red_s; })},
        {"min_green_s", real_at([](auto& c) -> auto& { return c.timing.min_green_s; })},
        {"max_cycle_s", real_at([](auto& c) -> auto& { return c.timing.max_cycle_s; })},
        {"saturation_margin",
         real_at([](auto& c) -> auto& { return c.timing.saturation_margin; })},
        {"vehicle_length_m", real_at([](auto& c) -> auto& { return c.vehicle.length_m; })},
        {"speed_limit_kph",
         real_at([](auto& c) -> auto& { return c.vehicle.speed_limit_kph; })},
        {"accel_mps2", real_at([](auto& c) -> auto& { return c.vehicle.accel_mps2; })},
        {"comfort_decel_mps2",
         real_at([](auto& c) -> auto& { return c.vehicle.comfort_decel_mps2; })},
        {"emergency_decel_mps2",
         real_at([](auto& c) -> auto& { return c.vehicle.emergency_decel_mps2; })},
        {"stop_margin_m", real_at([](auto& c) -> auto& { return c.vehicle.stop_margin_m; })},
        {"camera_fps", real_at([](auto& c) -> auto& { return c.camera.frame_rate_fps; })},
        {"camera_dropout",
         real_at([](auto& c) -> auto& { return c.camera.dropout_probability; })},
        {"camera_id_switch",
         real_at([](auto& c) -> auto& { return c.camera.id_switch_probability; })},
        {"camera_window_m", real_at([](auto& c) -> auto& { return c.camera.window_m; })},
        {"sector_length_m",
         real_at([](auto& c) -> auto& { return c.camera.sector_length_m; })},
        {"conflict_zone_m", real(&ScenarioConfig::conflict_zone_m)},
        {"duration_s", real(&ScenarioConfig::duration_s)},
        {"dt_s", real(&ScenarioConfig::dt_s)},
        {"record_interval_s", real(&ScenarioConfig::record_interval_s)},
        {"metrics_cycle_min", real(&ScenarioConfig::metrics_cycle_min)},
        {"seed",
         {[](ScenarioConfig& c, std::string_view v, std::size_t line) {
              const auto s = parse_int(v, line);
              if (s < 0) throw ParseError("seed must be nonnegative", line);
              c.seed = static_cast<std::uint64_t>(s);
          },
          [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
    };
    return table;
}

} // namespace

std::array<std::int64_t, 4> ScenarioConfig::lane_vehicles() const {
    std::array<std::int64_t, 4> lanes{};
    for (std::size_t ring = 0; ring < 2; ++ring) {
        const std::int64_t total = ring_vehicles[ring];
        const std::int64_t cw = clockwise_vehicles[ring].value_or((total + 1) / 2);
        lanes[2 * ring] = cw;
        lanes[2 * ring + 1] = total - cw;
    }
    return lanes;
}

std::int64_t ScenarioConfig::step_count() const {
    return static_cast<std::int64_t>(std::floor(duration_s / dt_s + 1e-9));
}

std::int64_t ScenarioConfig::steps_per_frame() const {
    return integer_ratio(1.0 / camera.frame_rate_fps, dt_s);
}

std::int64_t ScenarioConfig::steps_per_record() const {
    return integer_ratio(record_interval_s, dt_s);
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw InputError("scenario: " + msg); };
    if (!(dt_s > 0.0)) fail("dt_s must be positive");
    if (!(duration_s >= 0.0)) fail("duration_s must be nonnegative");
    for (std::size_t ring = 0; ring < 2; ++ring) {
        if (ring_vehicles[ring] < 0) fail("vehicle counts must be nonnegative");
        if (clockwise_vehicles[ring] &&
            (*clockwise_vehicles[ring] < 0 || *clockwise_vehicles[ring] > ring_vehicles[ring])) {
            fail("clockwise lane count must lie within the ring's vehicle count");
        }
        if (!(ring_length_m[ring] > 2.0 * camera.window_m + conflict_zone_m)) {
            fail("ring length too short for the camera window and conflict zone");
        }
    }
    if (!flow_model.valid()) fail("flow model parameters must be positive");
    if (!timing.valid()) fail("invalid signal timing");
    if (!(vehicle.length_m > 0.0)) fail("vehicle_length_m must be positive");
    if (!(vehicle.speed_limit_kph > 0.0)) fail("speed_limit_kph must be positive");
    if (!(vehicle.accel_mps2 > 0.0) || !(vehicle.comfort_decel_mps2 > 0.0) ||
        !(vehicle.emergency_decel_mps2 >= vehicle.comfort_decel_mps2)) {
        fail("need accel > 0 and emergency decel >= comfortable decel > 0");
    }
    if (!(vehicle.stop_margin_m >= 0.0)) fail("stop_margin_m must be nonnegative");
    if (!(conflict_zone_m >= 0.0)) fail("conflict_zone_m must be nonnegative");
    if (!(camera.frame_rate_fps > 0.0)) fail("camera_fps must be positive");
    if (!(camera.dropout_probability >= 0.0 && camera.dropout_probability < 1.0)) {
        fail("camera_dropout must lie in [0, 1)");
    }
    if (!(camera.id_switch_probability >= 0.0 && camera.id_switch_probability < 1.0)) {
        fail("camera_id_switch must lie in [0, 1)");
    }
    if (!(camera.sector_length_m > 0.0) || !(camera.window_m >= 2.0 * camera.sector_length_m)) {
        fail("camera window must contain both sectors");
    }
    if (steps_per_frame() < 1) fail("camera frame period must be a whole number of steps");
    if (steps_per_record() < 1) fail("record_interval_s must be a whole number of steps");
    if (!(metrics_cycle_min > 0.0)) fail("metrics_cycle_min must be positive");
}

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig config;
    std::set<std::string, std::less<>> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& table = fields();
        auto it = table.find(key);
        if (it == table.end()) {
            throw ParseError("unknown key '" + std::string(key) + "'", line_no);
        }
        if (!seen.insert(std::string(key)).second) {
            throw ParseError("duplicate key '" + std::string(key) + "'", line_no);
        }
        it->second.set(config, value, line_no);
    }
    config.validate();
    return config;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open scenario file '" + path + "'");
    }
    return parse_scenario(in);
}

void write_scenario(std::ostream& out, const ScenarioConfig& config) {
    for (const auto& [key, field] : fields()) {
        const auto text = field.get(config);
        if (!text.empty()) {
            out << key << " = " << text << '\n';
        }
    }
}

} // namespace sigsim
