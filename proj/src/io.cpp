#include "sigsim/io.hpp"

#include "sigsim/errors.hpp"

#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

namespace sigsim {

std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        throw Error("cannot format number");
    }
    return std::string(buffer, end);
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

double parse_double(std::string_view text, std::size_t line) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("expected a number, got '" + std::string(text) + "'", line);
    }
    return value;
}

std::int64_t parse_int(std::string_view text, std::size_t line) {
    text = trim(text);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("expected an integer, got '" + std::string(text) + "'", line);
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

namespace {

/// Calls `row(fields, line_no)` for every data row; a first non-comment row
/// whose first field is not numeric is taken as the header.
template <typename RowFn>
void for_each_csv_row(std::istream& in, RowFn&& row) {
    std::string raw;
    std::size_t line_no = 0;
    bool first_row = true;
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
        auto fields = split_csv(line);
        if (first_row) {
            first_row = false;
            const char c = fields.front().empty() ? '\0' : fields.front().front();
            const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
                                 c == '+' || c == '.';
            if (!numeric) {
                continue;
            }
        }
        row(fields, line_no);
    }
}

} // namespace

std::vector<SpeedDensitySample> read_calibration_samples(std::istream& in) {
    std::vector<SpeedDensitySample> samples;
    for_each_csv_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != 2) {
            throw ParseError("expected 2 fields (density_veh_per_km,speed_kph), got " +
                                 std::to_string(f.size()),
                             line);
        }
        SpeedDensitySample s{parse_double(f[0], line), parse_double(f[1], line)};
        if (s.density_vpkm < 0.0 || s.speed_kph < 0.0) {
            throw ParseError("density and speed must be nonnegative", line);
        }
        samples.push_back(s);
    });
    return samples;
}

std::vector<TrackObservation> read_track_file(std::istream& in) {
    std::vector<TrackObservation> out;
    for_each_csv_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != 4) {
            throw ParseError("expected 4 fields (frame_index,track_id,lane_id,position_m), got " +
                                 std::to_string(f.size()),
                             line);
        }
        TrackObservation obs;
        obs.frame_index = parse_int(f[0], line);
        obs.track_id = parse_int(f[1], line);
        obs.lane_id = std::string(f[2]);
        obs.position_m = parse_double(f[3], line);
        if (obs.frame_index < 0) {
            throw ParseError("frame_index must be nonnegative", line);
        }
        if (obs.lane_id.empty()) {
            throw ParseError("empty lane_id", line);
        }
        out.push_back(std::move(obs));
    });
    return out;
}

void write_track_file(std::ostream& out, const std::vector<TrackObservation>& observations) {
    out << "frame_index,track_id,lane_id,position_m\n";
    for (const auto& o : observations) {
        out << o.frame_index << ',' << o.track_id << ',' << o.lane_id << ','
            << format_double(o.position_m) << '\n';
    }
}

void write_flow_params(std::ostream& out, const FlowModelParams& params) {
    out << "free_flow_speed_kph = " << format_double(params.free_flow_speed_kph) << '\n'
        << "jam_density_vpkm = " << format_double(params.jam_density_vpkm) << '\n'
        << "max_flow_vph = " << format_double(max_flow(params)) << '\n';
}

FlowModelParams read_flow_params(std::istream& in) {
    FlowModelParams params{0.0, 0.0};
    bool have_speed = false;
    bool have_density = false;
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
            throw ParseError("expected key = value", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const double value = parse_double(line.substr(eq + 1), line_no);
        if (key == "free_flow_speed_kph") {
            params.free_flow_speed_kph = value;
            have_speed = true;
        } else if (key == "jam_density_vpkm") {
            params.jam_density_vpkm = value;
            have_density = true;
        } else if (key != "max_flow_vph") {
            throw ParseError("unknown key '" + std::string(key) + "'", line_no);
        }
    }
    if (!have_speed || !have_density || !params.valid()) {
        throw ParseError("parameter file needs positive free_flow_speed_kph and jam_density_vpkm");
    }
    return params;
}

} // namespace sigsim
