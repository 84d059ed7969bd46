#include "doctest.h"

#include "sigsim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sigsim;

namespace {

const fs::path kSource = SIGSIM_SOURCE_DIR;

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "sigsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sigsim_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string fixture(const std::string& name) {
    return (kSource / "tests" / "fixtures" / name).string();
}

} // namespace

TEST_CASE("calibrate recovers the default diagram") {
    const auto dir = scratch("calibrate");
    const auto r = invoke({"calibrate", (kSource / "data" / "calibration_default.csv").string(),
                           "--out", (dir / "params.txt").string()});
    CHECK(r.code == cli::kExitOk);
    const auto at = r.out.find("max_flow_vph = ");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(r.out.substr(at + 15)) == doctest::Approx(1678.95).epsilon(1e-9));
    CHECK(slurp(dir / "params.txt") == r.out);
}

TEST_CASE("count fixtures") {
    std::ostringstream out;
    cli::CountOptions o;
    o.track_file = fixture("one_crossing.csv");
    auto res = cli::cmd_count(o, out);
    CHECK(res.count == 1);
    CHECK(res.span_s == doctest::Approx(1.4));
    CHECK(res.flow_vps == doctest::Approx(1.0 / 1.4));
    CHECK(out.str() == "lane_id,count,span_s,flow_vps\n"
                       "A_cw,1,1.4,0.7142857142857143\n"
                       "total,1,1.4,0.7142857142857143\n");

    o.track_file = fixture("recross.csv");
    CHECK(cli::cmd_count(o, out).count == 1);

    o.track_file = fixture("dropout_gap.csv");
    CHECK(cli::cmd_count(o, out).count == 1);

    // a 1.2 s gap is too long
    o.track_file = fixture("dropout_gap.csv");
    o.frame_rate_fps = 3.0;
    CHECK(cli::cmd_count(o, out).count == 0);
}

TEST_CASE("count reports parse errors with their line") {
    const auto r = invoke({"count", fixture("bad_row.csv")});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("line 3") != std::string::npos);
    CHECK(invoke({"count", fixture("one_crossing.csv"), "--lane", "B_cw"}).code ==
          cli::kExitConfig);
    CHECK(invoke({"count", fixture("one_crossing.csv"), "--boundary", "40"}).code ==
          cli::kExitConfig);
}

TEST_CASE("compare reference tables") {
    const auto dir = scratch("compare");
    spit(dir / "fixed.json",
         R"([{"scenario": "0.175", "average_time_lost_s": 41.742},
             {"scenario": "80/20", "average_time_lost_s": 83.716}])");
    spit(dir / "adaptive.json",
         R"([{"scenario": "80/20", "average_time_lost_s": 44.982},
             {"scenario": "0.175", "average_time_lost_s": 30.517}])");
    auto r = invoke({"compare", (dir / "fixed.json").string(), (dir / "adaptive.json").string(),
                     "--out", (dir / "cmp").string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out == "scenario,fixed_time_lost_s,adaptive_time_lost_s,time_saved_pct\n"
                   "0.175,41.742,30.517,26.891\n"
                   "80/20,83.716,44.982,46.268\n");
    CHECK(slurp(dir / "cmp" / "comparison.csv") == r.out);

    r = invoke({"compare", (dir / "fixed.json").string(), (dir / "fixed.json").string()});
    CHECK(r.out.find("41.742,41.742,0.000") != std::string::npos);
    CHECK(r.out.find("83.716,83.716,0.000") != std::string::npos);

    spit(dir / "other.json", R"({"scenario": "70/30", "average_time_lost_s": 1.0})");
    r = invoke({"compare", (dir / "fixed.json").string(), (dir / "other.json").string()});
    CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    const auto c = scratch("sim_c");
    const auto scen = (kSource / "scenarios" / "smoke.txt").string();
    CHECK(invoke({"simulate", "--scenario", scen, "--out", a.string()}).code == cli::kExitOk);
    CHECK(invoke({"simulate", "--scenario", scen, "--out", b.string()}).code == cli::kExitOk);
    CHECK(invoke({"simulate", "--scenario", scen, "--out", c.string(), "--seed", "4"}).code ==
          cli::kExitOk);
    for (const char* f : {"scenario.txt", "trace.csv", "schedule.csv", "counts.csv", "windows.csv",
                          "safety.txt", "report.json"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "trace.csv") != slurp(c / "trace.csv"));
    CHECK(slurp(a / "trace.csv").rfind("time_s,vehicle_id,speed_mps\n", 0) == 0);
}

TEST_CASE("simulate mode override") {
    const auto dir = scratch("sim_mode");
    const auto r = invoke({"simulate", "--scenario", (kSource / "scenarios" / "smoke.txt").string(),
                           "--mode", "fixed", "--out", dir.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("mode                fixed") != std::string::npos);
    CHECK(invoke({"simulate", "--scenario", (kSource / "scenarios" / "smoke.txt").string(),
                  "--mode", "smart", "--out", dir.string()})
              .code == cli::kExitConfig);
}

TEST_CASE("sweep writes both figures and is repeatable") {
    const auto a = scratch("sweep_a");
    const auto b = scratch("sweep_b");
    auto r = invoke({"sweep", "--out", a.string(), "--threads", "4"});
    CHECK(r.code == cli::kExitOk);
    CHECK(invoke({"sweep", "--out", b.string(), "--threads", "1"}).code == cli::kExitOk);
    for (const char* f : {"figure_flow.csv", "figure_ratio.csv", "reports_fixed.json",
                          "reports_adaptive.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "figure_ratio.csv").find("ratio_80_20,") != std::string::npos);
    CHECK(fs::exists(a / "flow_0.150_adaptive" / "schedule.csv"));
}

TEST_CASE("exit codes") {
    CHECK(invoke({}).code == cli::kExitConfig);
    CHECK(invoke({"frobnicate"}).code == cli::kExitConfig);
    CHECK(invoke({"simulate"}).code == cli::kExitConfig);
    CHECK(invoke({"simulate", "--scenario", "/nonexistent.txt"}).code == cli::kExitConfig);
    CHECK(invoke({"calibrate", fixture("one_crossing.csv")}).code == cli::kExitConfig);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
}
