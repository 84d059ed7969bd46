#include "sigsim/controller.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigsim {

std::string_view road_name(Road road) { return road == Road::A ? "A" : "B"; }

bool SignalTiming::valid() const noexcept {
    return amber_s >= 0.0 && all_red_s >= 0.0 && min_green_s > 0.0 && max_cycle_s > 0.0 &&
           saturation_margin > 0.0 && phase_count > 0;
}

double flow_ratio(double realtime_flow_vps, double max_flow_vps) {
    if (!(max_flow_vps > 0.0)) {
        throw ZeroCapacity("maximum flow must be positive");
    }
    if (realtime_flow_vps < 0.0) {
        throw InputError("real-time flow must be nonnegative");
    }
    return realtime_flow_vps / max_flow_vps;
}

double road_flow(double lane_flow_1_vps, double lane_flow_2_vps) {
    return std::max(lane_flow_1_vps, lane_flow_2_vps);
}

WebsterComputation webster_schedule(double y_a, double y_b, const SignalTiming& timing) {
    if (!timing.valid()) {
        throw InputError("invalid signal timing");
    }
    if (!(y_a >= 0.0) || !(y_b >= 0.0) || !std::isfinite(y_a) || !std::isfinite(y_b)) {
        throw InputError("flow ratios must be finite and nonnegative");
    }
    WebsterComputation w;
    w.y_a = y_a;
    w.y_b = y_b;
    w.y_sum = y_a + y_b;
    if (w.y_sum <= 0.0) {
        throw BothZero("both roads report zero flow");
    }
    w.lost_time_s = timing.lost_time_s();
    const double denominator = std::max(std::abs(1.0 - w.y_sum), timing.saturation_margin);
    w.ideal_cycle_s = std::min(1.5 * w.lost_time_s / denominator, timing.max_cycle_s);
    const double effective_green = std::abs(w.ideal_cycle_s - w.lost_time_s);
    w.green_a_s = std::max(y_a / w.y_sum * effective_green, timing.min_green_s);
    w.green_b_s = std::max(y_b / w.y_sum * effective_green, timing.min_green_s);
    w.cycle_s = w.green_a_s + w.green_b_s + w.lost_time_s;
    return w;
}

WebsterComputation fixed_time_schedule(std::array<std::int64_t, 2> vehicle_counts,
                                       const FlowModelParams& flow_model,
                                       std::array<double, 2> road_lengths_m,
                                       const SignalTiming& timing) {
    const double capacity = max_flow(flow_model);
    std::array<double, 2> ratios{};
    for (std::size_t i = 0; i < 2; ++i) {
        if (vehicle_counts[i] < 0 || !(road_lengths_m[i] > 0.0)) {
            throw InputError("vehicle counts must be nonnegative and road lengths positive");
        }
        const double density = static_cast<double>(vehicle_counts[i]) / (road_lengths_m[i] / 1000.0);
        ratios[i] = flow_at_density(flow_model, density) / capacity;
    }
    return webster_schedule(ratios[0], ratios[1], timing);
}

std::string_view phase_name(Phase phase) {
    switch (phase) {
    case Phase::GreenA: return "GreenA";
    case Phase::AmberA: return "AmberA";
    case Phase::AllRed1: return "AllRed1";
    case Phase::GreenB: return "GreenB";
    case Phase::AmberB: return "AmberB";
    case Phase::AllRed2: return "AllRed2";
    }
    return "?";
}

Indication indication(Phase phase, Road road) {
    switch (phase) {
    case Phase::GreenA: return road == Road::A ? Indication::Green : Indication::Red;
    case Phase::AmberA: return road == Road::A ? Indication::Amber : Indication::Red;
    case Phase::GreenB: return road == Road::B ? Indication::Green : Indication::Red;
    case Phase::AmberB: return road == Road::B ? Indication::Amber : Indication::Red;
    case Phase::AllRed1:
    case Phase::AllRed2: return Indication::Red;
    }
    return Indication::Red;
}

double phase_duration(const PhaseState& state, const SignalTiming& timing) {
    switch (state.phase) {
    case Phase::GreenA: return state.schedule.green_a_s;
    case Phase::GreenB: return state.schedule.green_b_s;
    case Phase::AmberA:
    case Phase::AmberB: return timing.amber_s;
    case Phase::AllRed1:
    case Phase::AllRed2: return timing.all_red_s;
    }
    return 0.0;
}

std::vector<SignalEvent> step_phase(PhaseState& state, double dt, const SignalTiming& timing,
                                    ScheduleProvider& provider) {
    if (!(dt > 0.0)) {
        throw InputError("phase step must be positive");
    }
    constexpr double kEps = 1e-9;
    std::vector<SignalEvent> events;
    auto emit = [&](SignalEventKind kind, std::optional<Road> road, double offset) {
        events.push_back(SignalEvent{kind, road, offset});
        provider.on_event(events.back());
    };

    double offset = 0.0;
    double remaining = dt;
    while (true) {
        const double duration = phase_duration(state, timing);
        if (state.time_in_phase_s + remaining < duration - kEps) {
            state.time_in_phase_s += remaining;
            break;
        }
        const double consumed = std::max(0.0, duration - state.time_in_phase_s);
        offset += consumed;
        remaining = std::max(0.0, remaining - consumed);
        state.time_in_phase_s = 0.0;
        switch (state.phase) {
        case Phase::GreenA:
            state.phase = Phase::AmberA;
            emit(SignalEventKind::GreenEnd, Road::A, offset);
            emit(SignalEventKind::AmberStart, Road::A, offset);
            break;
        case Phase::AmberA:
            state.phase = Phase::AllRed1;
            break;
        case Phase::AllRed1:
            state.phase = Phase::GreenB;
            emit(SignalEventKind::GreenStart, Road::B, offset);
            break;
        case Phase::GreenB:
            state.phase = Phase::AmberB;
            emit(SignalEventKind::GreenEnd, Road::B, offset);
            emit(SignalEventKind::AmberStart, Road::B, offset);
            break;
        case Phase::AmberB:
            state.phase = Phase::AllRed2;
            break;
        case Phase::AllRed2:
            emit(SignalEventKind::CycleEnd, std::nullopt, offset);
            state.schedule = provider.next_cycle(state);
            ++state.cycle_index;
            state.phase = Phase::GreenA;
            emit(SignalEventKind::GreenStart, Road::A, offset);
            break;
        }
    }
    return events;
}

std::string_view mode_name(ControllerMode mode) {
    return mode == ControllerMode::Fixed ? "fixed" : "adaptive";
}

ControllerMode parse_mode(std::string_view text) {
    if (text == "fixed") return ControllerMode::Fixed;
    if (text == "adaptive") return ControllerMode::Adaptive;
    throw InputError("unknown controller mode '" + std::string(text) + "' (expected fixed|adaptive)");
}

class SignalController::Provider : public ScheduleProvider {
public:
    Provider(SignalController& owner, double step_start_s) : owner_(owner), start_(step_start_s) {}

    void on_event(const SignalEvent& event) override {
        owner_.handle(event, start_ + event.offset_s);
        timed.push_back(TimedEvent{event, start_ + event.offset_s});
    }
    GreenSplit next_cycle(const PhaseState&) override { return owner_.next_cycle(); }

    std::vector<TimedEvent> timed;

private:
    SignalController& owner_;
    double start_;
};

SignalController::SignalController(ControllerMode mode, const SignalTiming& timing,
                                   double max_flow_vph, const WebsterComputation& initial)
    : mode_(mode), timing_(timing), max_flow_vps_(max_flow_vph / 3600.0), current_(initial) {
    if (!timing_.valid()) {
        throw InputError("invalid signal timing");
    }
    if (!(max_flow_vps_ > 0.0)) {
        throw ZeroCapacity("maximum flow must be positive");
    }
    state_.schedule = GreenSplit{initial.green_a_s, initial.green_b_s};
    schedule_log_.push_back(ScheduleRecord{0, current_});
}

std::vector<SignalController::TimedEvent> SignalController::advance(double now_s, double dt) {
    Provider provider(*this, now_s);
    step_phase(state_, dt, timing_, provider);
    return std::move(provider.timed);
}

void SignalController::record_count(int lane, std::int64_t count) {
    if (lane < 0 || lane > 3) {
        throw InputError("lane index out of range: " + std::to_string(lane));
    }
    auto& window = windows_[static_cast<std::size_t>(lane / 2)];
    if (window.open) {
        window.lane_counts[static_cast<std::size_t>(lane % 2)] += count;
    }
}

void SignalController::handle(const SignalEvent& event, double time_s) {
    if (!event.road) {
        return;
    }
    const auto r = static_cast<std::size_t>(*event.road);
    auto& window = windows_[r];
    if (event.kind == SignalEventKind::GreenEnd && window.open && time_s > window.start_time_s) {
        WindowRecord record;
        record.road = *event.road;
        record.start_time_s = window.start_time_s;
        record.end_time_s = time_s;
        record.lane_counts = window.lane_counts;
        std::array<double, 2> lane_flows{};
        for (std::size_t lane = 0; lane < 2; ++lane) {
            lane_flows[lane] = realtime_flow(MeasurementWindow{std::string(road_name(*event.road)),
                                                               window.start_time_s, time_s,
                                                               window.lane_counts[lane]});
        }
        record.road_flow_vps = road_flow(lane_flows[0], lane_flows[1]);
        record.flow_ratio = flow_ratio(record.road_flow_vps, max_flow_vps_);
        window_log_.push_back(record);
        fresh_ratio_[r] = record.flow_ratio;
        window.open = false;
    } else if (event.kind == SignalEventKind::AmberStart) {
        window = OpenWindow{true, time_s, {}};
    }
}

GreenSplit SignalController::next_cycle() {
    if (mode_ == ControllerMode::Adaptive && fresh_ratio_[0] && fresh_ratio_[1]) {
        try {
            current_ = webster_schedule(*fresh_ratio_[0], *fresh_ratio_[1], timing_);
        } catch (const BothZero&) {
            // idle intersection: keep the previous split
        }
        fresh_ratio_ = {};
    }
    schedule_log_.push_back(ScheduleRecord{state_.cycle_index + 1, current_});
    return GreenSplit{current_.green_a_s, current_.green_b_s};
}

} // namespace sigsim
