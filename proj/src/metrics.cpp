#include "sigsim/metrics.hpp"

#include "sigsim/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>

namespace sigsim {

double average_speed(const SpeedTrace& trace) {
    // Neumaier summation; traces reach ~10^6 samples.
    double sum = 0.0;
    double compensation = 0.0;
    std::size_t count = 0;
    for (const auto& series : trace.speeds_mps) {
        for (double v : series) {
            const double t = sum + v;
            if (std::abs(sum) >= std::abs(v)) {
                compensation += (sum - t) + v;
            } else {
                compensation += (v - t) + sum;
            }
            sum = t;
            ++count;
        }
    }
    if (count == 0) {
        throw EmptyTrace("speed trace has no samples");
    }
    return mps_to_kph((sum + compensation) / static_cast<double>(count));
}

double total_time_lost(double average_speed_kph, double speed_limit_kph, double simulation_time_min) {
    if (!(speed_limit_kph > 0.0)) {
        throw InputError("speed limit must be positive");
    }
    if (average_speed_kph < 0.0 || average_speed_kph > speed_limit_kph * (1.0 + 1e-12)) {
        throw InputError("average speed must lie within [0, speed limit]");
    }
    return (speed_limit_kph - average_speed_kph) / speed_limit_kph * simulation_time_min;
}

double average_pass(double simulation_time_min, double total_time_lost_min, double cycle_time_min) {
    if (!(cycle_time_min > 0.0)) {
        throw InputError("cycle time must be positive");
    }
    return (simulation_time_min - total_time_lost_min) / cycle_time_min;
}

double average_time_lost(double total_time_lost_min, double passes) {
    if (!(passes > 0.0)) {
        throw NoPasses("average pass count must be positive");
    }
    return total_time_lost_min * 60.0 / passes;
}

MetricsReport evaluate(std::string scenario, std::optional<ControllerMode> mode,
                       double average_speed_kph, double simulation_time_min,
                       double speed_limit_kph, double cycle_time_min) {
    MetricsReport r;
    r.scenario = std::move(scenario);
    r.mode = mode;
    r.average_speed_kph = average_speed_kph;
    r.simulation_time_min = simulation_time_min;
    r.total_time_lost_min = total_time_lost(average_speed_kph, speed_limit_kph, simulation_time_min);
    r.average_pass = average_pass(simulation_time_min, r.total_time_lost_min, cycle_time_min);
    r.average_time_lost_s = average_time_lost(r.total_time_lost_min, r.average_pass);
    return r;
}

MetricsReport evaluate(const RunArtifacts& artifacts) {
    const auto& c = artifacts.config;
    const double sim_min = static_cast<double>(artifacts.steps) * c.dt_s / 60.0;
    return evaluate(c.label, c.mode, average_speed(artifacts.trace), sim_min,
                    c.vehicle.speed_limit_kph, c.metrics_cycle_min);
}

double compare(const MetricsReport& fixed, const MetricsReport& adaptive) {
    if (fixed.scenario != adaptive.scenario) {
        throw ScenarioMismatch("cannot compare scenario '" + fixed.scenario + "' with '" +
                               adaptive.scenario + "'");
    }
    if (fixed.average_time_lost_s == 0.0) {
        if (adaptive.average_time_lost_s == 0.0) {
            return 0.0;
        }
        throw InputError("fixed-time report for '" + fixed.scenario + "' has no time lost");
    }
    return (fixed.average_time_lost_s - adaptive.average_time_lost_s) / fixed.average_time_lost_s *
           100.0;
}

std::vector<ComparisonRow> compare_all(const std::vector<MetricsReport>& fixed,
                                       const std::vector<MetricsReport>& adaptive) {
    std::set<std::string> fixed_labels;
    for (const auto& r : fixed) {
        if (!fixed_labels.insert(r.scenario).second) {
            throw ScenarioMismatch("duplicate scenario '" + r.scenario + "' in fixed-time reports");
        }
    }
    std::set<std::string> adaptive_labels;
    for (const auto& r : adaptive) {
        if (!adaptive_labels.insert(r.scenario).second) {
            throw ScenarioMismatch("duplicate scenario '" + r.scenario + "' in adaptive reports");
        }
    }
    if (fixed_labels != adaptive_labels) {
        throw ScenarioMismatch("fixed-time and adaptive reports cover different scenarios");
    }
    std::vector<ComparisonRow> rows;
    for (const auto& f : fixed) {
        for (const auto& a : adaptive) {
            if (a.scenario == f.scenario) {
                rows.push_back(ComparisonRow{f.scenario, f.average_time_lost_s,
                                             a.average_time_lost_s, compare(f, a)});
            }
        }
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "scenario,fixed_time_lost_s,adaptive_time_lost_s,time_saved_pct\n";
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(3);
    for (const auto& row : rows) {
        out << row.scenario << ',' << row.fixed_time_lost_s << ',' << row.adaptive_time_lost_s << ','
            << row.time_saved_pct << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

namespace {

nlohmann::ordered_json to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    if (r.mode) {
        j["mode"] = std::string(mode_name(*r.mode));
    }
    j["average_speed_kph"] = r.average_speed_kph;
    j["simulation_time_min"] = r.simulation_time_min;
    j["total_time_lost_min"] = r.total_time_lost_min;
    j["average_pass"] = r.average_pass;
    j["average_time_lost_s"] = r.average_time_lost_s;
    return j;
}

MetricsReport from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ParseError("report must be a JSON object");
    }
    if (!j.contains("scenario") || !j["scenario"].is_string()) {
        throw ParseError("report is missing a string 'scenario'");
    }
    if (!j.contains("average_time_lost_s") || !j["average_time_lost_s"].is_number()) {
        throw ParseError("report '" + j["scenario"].get<std::string>() +
                         "' is missing a numeric 'average_time_lost_s'");
    }
    MetricsReport r;
    r.scenario = j["scenario"].get<std::string>();
    if (j.contains("mode")) {
        r.mode = parse_mode(j["mode"].get<std::string>());
    }
    auto number = [&](const char* key) {
        return j.contains(key) && j[key].is_number() ? j[key].get<double>() : 0.0;
    };
    r.average_speed_kph = number("average_speed_kph");
    r.simulation_time_min = number("simulation_time_min");
    r.total_time_lost_min = number("total_time_lost_min");
    r.average_pass = number("average_pass");
    r.average_time_lost_s = number("average_time_lost_s");
    return r;
}

} // namespace

void write_reports_json(std::ostream& out, const std::vector<MetricsReport>& reports) {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        doc.push_back(to_json(r));
    }
    out << doc.dump(2) << '\n';
}

std::vector<MetricsReport> read_reports_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what());
    }
    std::vector<MetricsReport> reports;
    if (doc.is_array()) {
        for (const auto& item : doc) {
            reports.push_back(from_json(item));
        }
    } else {
        reports.push_back(from_json(doc));
    }
    return reports;
}

} // namespace sigsim
