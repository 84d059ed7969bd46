#pragma once

#include "sigsim/controller.hpp"
#include "sigsim/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sigsim {

struct MetricsReport {
    std::string scenario;
    std::optional<ControllerMode> mode;
    double average_speed_kph = 0.0;
    double simulation_time_min = 0.0;
    double total_time_lost_min = 0.0;
    double average_pass = 0.0;
    double average_time_lost_s = 0.0;
};

/// Grand mean of every speed sample of every vehicle, in km/h.
/// Throws EmptyTrace when there is nothing to average.
double average_speed(const SpeedTrace& trace);

/// Minutes lost to the speed deficit: (limit - avg) / limit * sim_time.
double total_time_lost(double average_speed_kph, double speed_limit_kph, double simulation_time_min);

/// Intersection passes per vehicle: (sim_time - lost) / cycle_time.
double average_pass(double simulation_time_min, double total_time_lost_min,
                    double cycle_time_min = 3.0);

/// Seconds lost per pass. Throws NoPasses when passes <= 0.
double average_time_lost(double total_time_lost_min, double passes);

/// Runs the whole chain from a known average speed.
MetricsReport evaluate(std::string scenario, std::optional<ControllerMode> mode,
                       double average_speed_kph, double simulation_time_min,
                       double speed_limit_kph = 60.0, double cycle_time_min = 3.0);

MetricsReport evaluate(const RunArtifacts& artifacts);

/// Percent of the fixed-time average time lost saved by the adaptive run.
/// Throws ScenarioMismatch when labels differ.
double compare(const MetricsReport& fixed, const MetricsReport& adaptive);

struct ComparisonRow {
    std::string scenario;
    double fixed_time_lost_s = 0.0;
    double adaptive_time_lost_s = 0.0;
    double time_saved_pct = 0.0;
};

/// Pairs reports by scenario label, in the fixed list's order. Both lists must
/// carry exactly the same labels.
std::vector<ComparisonRow> compare_all(const std::vector<MetricsReport>& fixed,
                                       const std::vector<MetricsReport>& adaptive);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// JSON document: an array of report objects.
void write_reports_json(std::ostream& out, const std::vector<MetricsReport>& reports);
/// Accepts an array of report objects or a single object.
std::vector<MetricsReport> read_reports_json(std::istream& in);

} // namespace sigsim
