#pragma once

#include "sigsim/flow_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sigsim {

enum class Road { A, B };

std::string_view road_name(Road road);

/// Signal intervals. Amber and all-red are regulatory; the floor, cap and
/// saturation margin are guards for degenerate flow ratios.
struct SignalTiming {
    double amber_s = 4.0;
    double all_red_s = 2.0;
    double min_green_s = 5.0;
    double max_cycle_s = 120.0;
    /// Lower clamp on |1 - Y| in the ideal-cycle denominator.
    double saturation_margin = 0.15;
    int phase_count = 2;

    double lost_time_s() const noexcept { return phase_count * (amber_s + all_red_s); }
    bool valid() const noexcept;
};

/// Every intermediate quantity of one Webster evaluation.
struct WebsterComputation {
    double y_a = 0.0;
    double y_b = 0.0;
    double y_sum = 0.0;
    double lost_time_s = 0.0;
    double ideal_cycle_s = 0.0;
    double green_a_s = 0.0;
    double green_b_s = 0.0;
    double cycle_s = 0.0;

    bool operator==(const WebsterComputation&) const = default;
};

/// Throws ZeroCapacity when max_flow is not positive.
double flow_ratio(double realtime_flow_vps, double max_flow_vps);

/// A road's demand is the larger of its two directional lane flows.
double road_flow(double lane_flow_1_vps, double lane_flow_2_vps);

/// C0 = 1.5 L / |1 - Y| with |1 - Y| clamped below by the saturation margin and
/// C0 capped at max_cycle; greens split |C0 - L| by y_i / Y and are floored at
/// min_green. Throws BothZero when Y = 0.
WebsterComputation webster_schedule(double y_a, double y_b, const SignalTiming& timing);

/// Baseline schedule from the initial vehicle count on each road: count per
/// ring length gives a density, the flow model turns it into a flow, and the
/// flow over capacity is the ratio fed to webster_schedule.
WebsterComputation fixed_time_schedule(std::array<std::int64_t, 2> vehicle_counts,
                                       const FlowModelParams& flow_model,
                                       std::array<double, 2> road_lengths_m,
                                       const SignalTiming& timing);

enum class Phase { GreenA, AmberA, AllRed1, GreenB, AmberB, AllRed2 };

std::string_view phase_name(Phase phase);

enum class Indication { Green, Amber, Red };

Indication indication(Phase phase, Road road);

struct GreenSplit {
    double green_a_s = 0.0;
    double green_b_s = 0.0;
};

struct PhaseState {
    Phase phase = Phase::GreenA;
    double time_in_phase_s = 0.0;
    GreenSplit schedule;
    std::int64_t cycle_index = 0;
};

double phase_duration(const PhaseState& state, const SignalTiming& timing);

enum class SignalEventKind { GreenStart, GreenEnd, AmberStart, CycleEnd };

struct SignalEvent {
    SignalEventKind kind;
    std::optional<Road> road;
    double offset_s = 0.0; ///< time into the step at which the event fired
};

/// Receives phase events in order and supplies the split for each new cycle.
class ScheduleProvider {
public:
    virtual ~ScheduleProvider() = default;
    virtual void on_event(const SignalEvent& event) { (void)event; }
    virtual GreenSplit next_cycle(const PhaseState& finished) = 0;
};

/// Advances the six-state machine by dt, carrying any overshoot into the next
/// phase. GreenEnd and AmberStart fire together at the end of each green; the
/// provider is asked for the next split at CycleEnd.
std::vector<SignalEvent> step_phase(PhaseState& state, double dt, const SignalTiming& timing,
                                    ScheduleProvider& provider);

enum class ControllerMode { Fixed, Adaptive };

std::string_view mode_name(ControllerMode mode);
ControllerMode parse_mode(std::string_view text);

/// One closed measurement window of one road.
struct WindowRecord {
    Road road = Road::A;
    double start_time_s = 0.0;
    double end_time_s = 0.0;
    std::array<std::int64_t, 2> lane_counts{};
    double road_flow_vps = 0.0;
    double flow_ratio = 0.0;
};

struct ScheduleRecord {
    std::int64_t cycle_index = 0;
    WebsterComputation computation;
};

/// Signal controller for the two-road intersection. Lanes 0 and 1 feed road A,
/// lanes 2 and 3 feed road B. In adaptive mode each road's window runs from its
/// amber onset to its next green end; the split is recomputed at cycle end once
/// both roads have a freshly closed window.
class SignalController {
public:
    SignalController(ControllerMode mode, const SignalTiming& timing, double max_flow_vph,
                     const WebsterComputation& initial);

    /// Advances from `now_s` by dt. Events carry absolute times in `time_s`.
    struct TimedEvent {
        SignalEvent event;
        double time_s;
    };
    std::vector<TimedEvent> advance(double now_s, double dt);

    /// Adds vehicles counted on a lane to that road's open window, if any.
    void record_count(int lane, std::int64_t count);

    const PhaseState& state() const noexcept { return state_; }
    Indication indication_for(Road road) const { return indication(state_.phase, road); }
    ControllerMode mode() const noexcept { return mode_; }
    const std::vector<ScheduleRecord>& schedule_log() const noexcept { return schedule_log_; }
    const std::vector<WindowRecord>& window_log() const noexcept { return window_log_; }

private:
    class Provider;
    friend class Provider;

    void handle(const SignalEvent& event, double time_s);
    GreenSplit next_cycle();

    struct OpenWindow {
        bool open = false;
        double start_time_s = 0.0;
        std::array<std::int64_t, 2> lane_counts{};
    };

    ControllerMode mode_;
    SignalTiming timing_;
    double max_flow_vps_;
    PhaseState state_;
    WebsterComputation current_;
    std::array<OpenWindow, 2> windows_{};
    std::array<std::optional<double>, 2> fresh_ratio_{};
    std::vector<ScheduleRecord> schedule_log_;
    std::vector<WindowRecord> window_log_;
};

} // namespace sigsim
