#pragma once

#include "sigsim/flow_model.hpp"
#include "sigsim/sensing.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sigsim {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses a whole field as a double / integer; throws ParseError on garbage.
double parse_double(std::string_view text, std::size_t line = 0);
std::int64_t parse_int(std::string_view text, std::size_t line = 0);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_csv(std::string_view line);

/// `density_veh_per_km,speed_kph` rows; optional header, `#` comments.
std::vector<SpeedDensitySample> read_calibration_samples(std::istream& in);

/// `frame_index,track_id,lane_id,position_m` rows; optional header, `#`
/// comments. Parse errors report the line number.
std::vector<TrackObservation> read_track_file(std::istream& in);
void write_track_file(std::ostream& out, const std::vector<TrackObservation>& observations);

/// Flow-model parameter file written by `calibrate`.
void write_flow_params(std::ostream& out, const FlowModelParams& params);
FlowModelParams read_flow_params(std::istream& in);

} // namespace sigsim
