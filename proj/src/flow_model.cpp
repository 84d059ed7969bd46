#include "sigsim/flow_model.hpp"

#include "sigsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigsim {

namespace {

void require_valid(const FlowModelParams& params) {
    if (!params.valid()) {
        throw InputError("flow model: free-flow speed and jam density must be positive");
    }
}

} // namespace

FlowModelParams fit_speed_density(std::span<const SpeedDensitySample> samples) {
    if (samples.size() < 2) {
        throw DegenerateFit("need at least 2 samples, got " + std::to_string(samples.size()));
    }
    // Centered sums keep the normal equations well conditioned.
    double mean_k = 0.0;
    double mean_v = 0.0;
    for (const auto& s : samples) {
        if (s.density_vpkm < 0.0 || s.speed_kph < 0.0) {
            throw InputError("calibration samples must have nonnegative density and speed");
        }
        mean_k += s.density_vpkm;
        mean_v += s.speed_kph;
    }
    const auto n = static_cast<double>(samples.size());
    mean_k /= n;
    mean_v /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double dk = s.density_vpkm - mean_k;
        sxx += dk * dk;
        sxy += dk * (s.speed_kph - mean_v);
    }
    if (sxx <= 0.0) {
        throw DegenerateFit("all samples share one density; the line is underdetermined");
    }
    const double slope = sxy / sxx;
    const double intercept = mean_v - slope * mean_k;
    if (!(slope < 0.0)) {
        throw DegenerateFit("fitted slope is not negative (" + std::to_string(slope) + ")");
    }
    if (!(intercept > 0.0)) {
        throw DegenerateFit("fitted intercept is not positive (" + std::to_string(intercept) + ")");
    }
    return FlowModelParams{intercept, -intercept / slope};
}

double speed_at_density(const FlowModelParams& params, double density_vpkm) {
    const double k = std::max(density_vpkm, 0.0);
    if (k >= params.jam_density_vpkm) {
        return 0.0;
    }
    return params.free_flow_speed_kph * (1.0 - k / params.jam_density_vpkm);
}

double flow_at_density(const FlowModelParams& params, double density_vpkm) {
    return speed_at_density(params, density_vpkm) * std::max(density_vpkm, 0.0);
}

double max_flow(const FlowModelParams& params) {
    require_valid(params);
    return params.free_flow_speed_kph * params.jam_density_vpkm / 4.0;
}

double density_for_flow(const FlowModelParams& params, double flow_vph, DensityBranch branch) {
    const double capacity = max_flow(params);
    if (flow_vph < 0.0) {
        throw InputError("flow must be nonnegative");
    }
    if (flow_vph > capacity * (1.0 + 1e-9)) {
        throw FlowExceedsCapacity("flow " + std::to_string(flow_vph) + " veh/h exceeds capacity " +
                                  std::to_string(capacity) + " veh/h");
    }
    const double half_jam = params.jam_density_vpkm / 2.0;
    // k = k_j/2 (1 -/+ sqrt(1 - q/q_max)); the discriminant is clamped for
    // flows within tolerance above capacity.
    const double root = std::sqrt(std::max(0.0, 1.0 - flow_vph / capacity));
    if (branch == DensityBranch::Uncongested) {
        // Rationalized form avoids cancellation for small flows.
        return half_jam * (flow_vph / capacity) / (1.0 + root);
    }
    return half_jam * (1.0 + root);
}

double speed_for_gap(const FlowModelParams& params, double gap_m, double vehicle_length_m) {
    const double spacing = std::max(gap_m, 0.0) + vehicle_length_m;
    const double density = 1000.0 / spacing;
    return std::clamp(speed_at_density(params, density), 0.0, params.free_flow_speed_kph);
}

double jam_gap(const FlowModelParams& params, double vehicle_length_m) {
    return 1000.0 / params.jam_density_vpkm - vehicle_length_m;
}

} // namespace sigsim
