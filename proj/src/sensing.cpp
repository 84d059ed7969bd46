#include "sigsim/sensing.hpp"

#include "sigsim/errors.hpp"

#include <cmath>

namespace sigsim {

SectorLayout SectorLayout::ending_at(std::string lane_id, double stop_line_m,
                                     double sector_length_m) {
    return SectorLayout{std::move(lane_id), stop_line_m - 2.0 * sector_length_m,
                        stop_line_m - sector_length_m, stop_line_m};
}

Sector classify_sector(const SectorLayout& layout, const TrackObservation& obs) {
    const double x = obs.position_m;
    if (x >= layout.sector1_start_m && x < layout.boundary_m) {
        return Sector::One;
    }
    if (x >= layout.boundary_m && x <= layout.sector2_end_m) {
        return Sector::Two;
    }
    return Sector::None;
}

CounterState::CounterState(double frame_rate_fps) : frame_rate_(frame_rate_fps) {
    if (!(frame_rate_fps > 0.0)) {
        throw InputError("counter frame rate must be positive");
    }
    // The small slack keeps e.g. 5.000000001 from rounding up to 6 frames.
    grace_frames_ = static_cast<std::int64_t>(std::ceil(frame_rate_fps * 1.0 - 1e-9));
}

std::optional<std::int64_t> CounterState::last_sector1_frame(TrackId id) const {
    if (auto it = sector1_memory_.find(id); it != sector1_memory_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::vector<TrackId> update_counter(CounterState& state, const SectorLayout& layout,
                                    std::span<const TrackObservation> observations,
                                    std::int64_t frame_index) {
    std::vector<TrackId> newly_counted;
    for (const auto& obs : observations) {
        if (obs.lane_id != layout.lane_id || obs.frame_index != frame_index) {
            throw InputError("observation for lane '" + obs.lane_id + "' frame " +
                             std::to_string(obs.frame_index) + " fed to counter of lane '" +
                             layout.lane_id + "' at frame " + std::to_string(frame_index));
        }
        switch (classify_sector(layout, obs)) {
        case Sector::One:
            state.sector1_memory_[obs.track_id] = frame_index;
            break;
        case Sector::Two: {
            auto it = state.sector1_memory_.find(obs.track_id);
            if (it == state.sector1_memory_.end()) {
                break;
            }
            const bool recent = frame_index - it->second <= state.grace_frames_;
            if (recent && !state.counted_ids_.contains(obs.track_id)) {
                state.counted_ids_.insert(obs.track_id);
                ++state.count_;
                newly_counted.push_back(obs.track_id);
            }
            state.sector1_memory_.erase(it);
            break;
        }
        case Sector::None:
            break;
        }
    }
    std::erase_if(state.sector1_memory_, [&](const auto& entry) {
        return frame_index - entry.second > state.grace_frames_;
    });
    return newly_counted;
}

double realtime_flow(const MeasurementWindow& window) {
    const double length = window.end_time_s - window.start_time_s;
    if (!(length > 0.0)) {
        throw EmptyWindow("measurement window for road '" + window.road_id +
                          "' has non-positive length");
    }
    return static_cast<double>(window.vehicle_count) / length;
}

bool VirtualCameraConfig::valid() const noexcept {
    return frame_rate_fps > 0.0 && dropout_probability >= 0.0 && dropout_probability < 1.0 &&
           id_switch_probability >= 0.0 && id_switch_probability < 1.0 &&
           window_start_m < window_end_m;
}

VirtualCamera::VirtualCamera(VirtualCameraConfig config, std::uint64_t stream)
    : config_(std::move(config)),
      rng_(config_.rng_seed, stream),
      next_switched_id_(1'000'000'000'000LL + static_cast<TrackId>(stream) * 1'000'000'000LL) {
    if (!config_.valid()) {
        throw InputError("invalid virtual camera configuration for lane '" + config_.lane_id + "'");
    }
}

std::vector<TrackObservation> VirtualCamera::observe(std::span<const VehiclePose> poses,
                                                     std::int64_t frame_index) {
    std::vector<TrackObservation> out;
    for (const auto& pose : poses) {
        if (pose.position_m < config_.window_start_m || pose.position_m >= config_.window_end_m) {
            continue;
        }
        if (config_.dropout_probability > 0.0 && rng_.bernoulli(config_.dropout_probability)) {
            continue;
        }
        TrackId id = pose.pass_index * kTrackIdStride + pose.vehicle_id;
        if (config_.id_switch_probability > 0.0) {
            if (rng_.bernoulli(config_.id_switch_probability)) {
                switched_ids_[id] = next_switched_id_++;
            }
            if (auto it = switched_ids_.find(id); it != switched_ids_.end()) {
                id = it->second;
            }
        }
        out.push_back(TrackObservation{frame_index, id, config_.lane_id, pose.position_m});
    }
    return out;
}

} // namespace sigsim
