#pragma once

#include <span>

namespace sigsim {

/// One (density, speed) observation used to calibrate the speed-density line.
struct SpeedDensitySample {
    double density_vpkm = 0.0;
    double speed_kph = 0.0;
};

/// Greenshields fundamental diagram v = v_f (1 - k / k_j).
struct FlowModelParams {
    double free_flow_speed_kph = 60.0;
    double jam_density_vpkm = 111.93;

    bool valid() const noexcept { return free_flow_speed_kph > 0.0 && jam_density_vpkm > 0.0; }
};

enum class DensityBranch { Uncongested, Congested };

/// Ordinary least squares on speed against density. Throws DegenerateFit when
/// the densities do not vary or the fitted line has no positive intercepts.
FlowModelParams fit_speed_density(std::span<const SpeedDensitySample> samples);

/// Speed in km/h at the given density, clamped to zero beyond jam density.
double speed_at_density(const FlowModelParams& params, double density_vpkm);

/// Flow in veh/h.
double flow_at_density(const FlowModelParams& params, double density_vpkm);

/// Capacity v_f k_j / 4 in veh/h, reached at k_j / 2.
double max_flow(const FlowModelParams& params);

/// Inverse of flow_at_density on the requested side of k_j / 2.
/// Throws FlowExceedsCapacity when flow is above capacity.
double density_for_flow(const FlowModelParams& params, double flow_vph, DensityBranch branch);

/// Steady-state speed for a bumper-to-bumper gap, via the density
/// 1000 / (gap + vehicle_length). Result is in km/h within [0, v_f].
double speed_for_gap(const FlowModelParams& params, double gap_m, double vehicle_length_m);

/// Gap at which speed_for_gap first reaches zero.
double jam_gap(const FlowModelParams& params, double vehicle_length_m);

inline constexpr double kph_to_mps(double kph) { return kph / 3.6; }
inline constexpr double mps_to_kph(double mps) { return mps * 3.6; }

} // namespace sigsim
