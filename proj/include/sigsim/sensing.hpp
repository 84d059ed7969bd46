#pragma once

#include "sigsim/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sigsim {

using TrackId = std::int64_t;

/// One per-frame sighting of one tracked vehicle on an approach lane.
struct TrackObservation {
    std::int64_t frame_index = 0;
    TrackId track_id = 0;
    std::string lane_id;
    double position_m = 0.0; ///< along the lane toward the stop line
};

/// Two adjacent counting sectors on one approach lane:
/// sector 1 = [sector1_start, boundary), sector 2 = [boundary, sector2_end].
struct SectorLayout {
    std::string lane_id;
    double sector1_start_m = 0.0;
    double boundary_m = 15.0;
    double sector2_end_m = 30.0;

    bool valid() const noexcept {
        return sector1_start_m < boundary_m && boundary_m < sector2_end_m;
    }

    /// Default geometry: two sectors of `sector_length` ending at `stop_line`.
    static SectorLayout ending_at(std::string lane_id, double stop_line_m, double sector_length_m);
};

enum class Sector { None, One, Two };

Sector classify_sector(const SectorLayout& layout, const TrackObservation& obs);

/// Per-lane two-sector counter. A track counts once, when it is seen in
/// sector 2 no more than one second of frames after a sector-1 sighting.
class CounterState {
public:
    explicit CounterState(double frame_rate_fps = 5.0);

    /// ceil(frame_rate * 1 s).
    std::int64_t grace_frames() const noexcept { return grace_frames_; }
    double frame_rate() const noexcept { return frame_rate_; }
    std::int64_t count() const noexcept { return count_; }

    bool was_counted(TrackId id) const { return counted_ids_.contains(id); }
    std::optional<std::int64_t> last_sector1_frame(TrackId id) const;
    std::size_t memory_size() const noexcept { return sector1_memory_.size(); }

private:
    friend std::vector<TrackId> update_counter(CounterState&, const SectorLayout&,
                                               std::span<const TrackObservation>, std::int64_t);

    double frame_rate_;
    std::int64_t grace_frames_;
    std::unordered_set<TrackId> counted_ids_;
    std::unordered_map<TrackId, std::int64_t> sector1_memory_;
    std::int64_t count_ = 0;
};

/// Feeds one frame of observations for the layout's lane into the counter and
/// returns the tracks counted on this frame, in observation order. Frames must
/// be presented in nondecreasing order.
std::vector<TrackId> update_counter(CounterState& state, const SectorLayout& layout,
                                    std::span<const TrackObservation> observations,
                                    std::int64_t frame_index);

/// Vehicles counted on one road from its amber onset to its next green end.
struct MeasurementWindow {
    std::string road_id;
    double start_time_s = 0.0;
    double end_time_s = 0.0;
    std::int64_t vehicle_count = 0;
};

/// vehicle_count / window length, veh/s. Throws EmptyWindow for a
/// non-positive length.
double realtime_flow(const MeasurementWindow& window);

/// Stand-in for the detector and tracker: turns vehicle poses into track
/// observations.
struct VirtualCameraConfig {
    std::string lane_id;
    double window_start_m = 0.0;
    double window_end_m = 50.0;
    double frame_rate_fps = 5.0;
    double dropout_probability = 0.0;
    double id_switch_probability = 0.0;
    std::uint64_t rng_seed = 0;

    bool valid() const noexcept;
};

/// Ground-truth pose of one vehicle on the camera's lane.
struct VehiclePose {
    std::int64_t vehicle_id = 0;
    std::int64_t pass_index = 0; ///< completed laps; a new lap is a new track
    double position_m = 0.0;
};

/// Track ids are pass_index * kTrackIdStride + vehicle_id, so a vehicle that
/// leaves the view and comes back around the loop gets a fresh track.
inline constexpr TrackId kTrackIdStride = 1'000'000;

class VirtualCamera {
public:
    explicit VirtualCamera(VirtualCameraConfig config, std::uint64_t stream = 0);

    const VirtualCameraConfig& config() const noexcept { return config_; }

    /// One observation per vehicle inside the visible window, each dropped
    /// independently with the configured probability.
    std::vector<TrackObservation> observe(std::span<const VehiclePose> poses,
                                          std::int64_t frame_index);

private:
    VirtualCameraConfig config_;
    Rng rng_;
    std::unordered_map<TrackId, TrackId> switched_ids_;
    TrackId next_switched_id_;
};

} // namespace sigsim
