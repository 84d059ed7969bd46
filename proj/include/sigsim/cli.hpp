#pragma once

#include "sigsim/controller.hpp"
#include "sigsim/sensing.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sigsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;

/// Fits the sample file, writes `params_out` (if given) and prints q_max.
void cmd_calibrate(const std::string& sample_file, const std::optional<std::string>& params_out,
                   std::ostream& out);

struct SimulateOptions {
    std::string scenario_file;
    std::optional<std::uint64_t> seed;
    std::optional<ControllerMode> mode;
    std::filesystem::path out_dir = "out";
};

/// Runs one scenario, writes trace/schedule/count/window logs and the report.
/// Returns kExitInvariant if a safety check failed, kExitOk otherwise.
int cmd_simulate(const SimulateOptions& options, std::ostream& out);

struct CountOptions {
    std::string track_file;
    std::optional<std::string> lane_id;
    double sector1_start_m = 0.0;
    double boundary_m = 15.0;
    double sector2_end_m = 30.0;
    double frame_rate_fps = 5.0;
};

struct CountResult {
    std::int64_t count = 0;
    double span_s = 0.0;
    double flow_vps = 0.0;
};

/// Replays a track file through one counter per lane; the flow is the count
/// over the file's frame span, (last - first + 1) / fps.
CountResult cmd_count(const CountOptions& options, std::ostream& out);

void cmd_compare(const std::string& fixed_reports, const std::string& adaptive_reports,
                 const std::optional<std::filesystem::path>& out_dir, std::ostream& out);

struct SweepOptions {
    std::filesystem::path out_dir = "sweep";
    std::uint64_t seed = 1;
    unsigned threads = 0; ///< 0: hardware concurrency
    bool write_traces = false;
};

int cmd_sweep(const SweepOptions& options, std::ostream& out);

/// Full command line front end; maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sigsim::cli
