#include "doctest.h"

#include "sigsim/errors.hpp"
#include "sigsim/flow_model.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace sigsim;

namespace {

const FlowModelParams k60_112{60.0, 112.0};

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace

TEST_CASE("fit recovers an exact line") {
    const std::vector<SpeedDensitySample> s{{0, 60}, {56, 30}, {112, 0}};
    const auto p = fit_speed_density(s);
    CHECK(p.free_flow_speed_kph == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(p.jam_density_vpkm == doctest::Approx(112.0).epsilon(1e-12));
}

TEST_CASE("fit on v = 60 - 0.5k gives k_j = 120") {
    const std::vector<SpeedDensitySample> s{{10, 55}, {20, 50}, {30, 45}};
    const auto p = fit_speed_density(s);
    CHECK(p.free_flow_speed_kph == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(p.jam_density_vpkm == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("fit rejects degenerate input") {
    const std::vector<SpeedDensitySample> same{{20, 50}, {20, 40}, {20, 45}};
    CHECK_THROWS_AS(fit_speed_density(same), DegenerateFit);
    const std::vector<SpeedDensitySample> one{{20, 50}};
    CHECK_THROWS_AS(fit_speed_density(one), DegenerateFit);
    CHECK_THROWS_AS(fit_speed_density(std::vector<SpeedDensitySample>{}), DegenerateFit);
    // rising line: no jam density
    const std::vector<SpeedDensitySample> up{{10, 20}, {20, 30}};
    CHECK_THROWS_AS(fit_speed_density(up), DegenerateFit);
}

TEST_CASE("fit recovers random noiseless lines to 1e-9") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> vf(20.0, 130.0), kj(60.0, 200.0);
    for (int trial = 0; trial < 200; ++trial) {
        const FlowModelParams truth{vf(gen), kj(gen)};
        std::uniform_real_distribution<double> k(0.0, truth.jam_density_vpkm);
        std::vector<SpeedDensitySample> s;
        for (int i = 0; i < 25; ++i) {
            const double d = k(gen);
            s.push_back({d, truth.free_flow_speed_kph * (1.0 - d / truth.jam_density_vpkm)});
        }
        const auto p = fit_speed_density(s);
        CHECK(rel_close(p.free_flow_speed_kph, truth.free_flow_speed_kph, 1e-9));
        CHECK(rel_close(p.jam_density_vpkm, truth.jam_density_vpkm, 1e-9));
    }
}

TEST_CASE("speed and flow at density") {
    CHECK(speed_at_density(k60_112, 0) == 60.0);
    CHECK(speed_at_density(k60_112, 112) == 0.0);
    CHECK(speed_at_density(k60_112, 56) == 30.0);
    CHECK(speed_at_density(k60_112, 150) == 0.0);
    CHECK(flow_at_density(k60_112, 56) == doctest::Approx(1680.0));
    CHECK(flow_at_density(k60_112, 0) == 0.0);
    CHECK(flow_at_density(FlowModelParams{}, 55.965) == doctest::Approx(1678.95).epsilon(1e-9));
}

TEST_CASE("max flow") {
    CHECK(max_flow(k60_112) == doctest::Approx(1680.0));
    CHECK(max_flow(FlowModelParams{}) == doctest::Approx(1678.95));
    CHECK(max_flow(FlowModelParams{50, 100}) == doctest::Approx(1250.0));
    CHECK(std::abs(max_flow(FlowModelParams{}) - 1679.0) <= 1.0);
}

TEST_CASE("density for flow") {
    CHECK(density_for_flow(k60_112, 1680, DensityBranch::Uncongested) == doctest::Approx(56.0));
    CHECK(density_for_flow(k60_112, 1680, DensityBranch::Congested) == doctest::Approx(56.0));
    CHECK(density_for_flow(k60_112, 0, DensityBranch::Uncongested) == 0.0);
    CHECK(density_for_flow(k60_112, 0, DensityBranch::Congested) == doctest::Approx(112.0));
    // 60k(1 - k/112) = 900 has roots 56 -/+ sqrt(1456)
    CHECK(density_for_flow(k60_112, 900, DensityBranch::Uncongested) ==
          doctest::Approx(17.8424319433).epsilon(1e-9));
    CHECK(density_for_flow(k60_112, 900, DensityBranch::Congested) ==
          doctest::Approx(94.1575680567).epsilon(1e-9));
    CHECK_THROWS_AS(density_for_flow(k60_112, 1700, DensityBranch::Uncongested),
                    FlowExceedsCapacity);
}

TEST_CASE("density_for_flow inverts flow_at_density on both branches") {
    const FlowModelParams p{};
    for (int i = 0; i <= 100; ++i) {
        const double q = max_flow(p) * i / 100.0;
        const double lo = density_for_flow(p, q, DensityBranch::Uncongested);
        const double hi = density_for_flow(p, q, DensityBranch::Congested);
        CHECK(lo <= p.jam_density_vpkm / 2 + 1e-9);
        CHECK(hi >= p.jam_density_vpkm / 2 - 1e-9);
        CHECK(flow_at_density(p, lo) == doctest::Approx(q).epsilon(1e-9));
        CHECK(flow_at_density(p, hi) == doctest::Approx(q).epsilon(1e-9));
    }
}

TEST_CASE("speed for gap") {
    CHECK(speed_for_gap(k60_112, 1e6, 4.643) == doctest::Approx(60.0).epsilon(1e-3));
    CHECK(speed_for_gap(k60_112, 4.286, 4.643) < 0.01);
    CHECK(speed_for_gap(k60_112, 4.0, 4.643) == 0.0);
    CHECK(speed_for_gap(k60_112, 13.215, 4.643) == doctest::Approx(30.0).epsilon(1e-4));
    // 1000/112 - 4.643
    CHECK(jam_gap(k60_112, 4.643) == doctest::Approx(4.285571).epsilon(1e-6));
    CHECK(speed_for_gap(k60_112, jam_gap(k60_112, 4.643), 4.643) == doctest::Approx(0.0));
}

TEST_CASE("speed for gap is nondecreasing and bounded") {
    const FlowModelParams p{};
    double prev = -1.0;
    for (double g = 0.0; g < 400.0; g += 0.25) {
        const double v = speed_for_gap(p, g, 4.643);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= p.free_flow_speed_kph);
        prev = v;
    }
}

TEST_CASE("unit conversion") {
    CHECK(kph_to_mps(60.0) == doctest::Approx(16.6666667));
    CHECK(mps_to_kph(kph_to_mps(37.5)) == doctest::Approx(37.5));
}
