#include "doctest.h"

#include "sigsim/errors.hpp"
#include "sigsim/sensing.hpp"

#include <set>
#include <vector>

using namespace sigsim;

namespace {

const SectorLayout kLayout{"A_cw", 0.0, 15.0, 30.0};

TrackObservation at(std::int64_t frame, TrackId id, double pos) {
    return TrackObservation{frame, id, "A_cw", pos};
}

std::vector<TrackId> feed(CounterState& st, std::int64_t frame,
                          std::vector<TrackObservation> obs = {}) {
    return update_counter(st, kLayout, obs, frame);
}

} // namespace

TEST_CASE("classify sector edges") {
    CHECK(classify_sector(kLayout, at(0, 1, 0.0)) == Sector::One);
    CHECK(classify_sector(kLayout, at(0, 1, 14.999)) == Sector::One);
    CHECK(classify_sector(kLayout, at(0, 1, 15.0)) == Sector::Two);
    CHECK(classify_sector(kLayout, at(0, 1, 30.0)) == Sector::Two);
    CHECK(classify_sector(kLayout, at(0, 1, 30.01)) == Sector::None);
    CHECK(classify_sector(kLayout, at(0, 1, -0.01)) == Sector::None);
}

TEST_CASE("layout ending at the stop line") {
    const auto l = SectorLayout::ending_at("B_ccw", 3200.0, 15.0);
    CHECK(l.sector1_start_m == 3170.0);
    CHECK(l.boundary_m == 3185.0);
    CHECK(l.sector2_end_m == 3200.0);
    CHECK(l.valid());
    CHECK_FALSE(SectorLayout{"x", 10, 10, 20}.valid());
}

TEST_CASE("grace window is one second of frames") {
    CHECK(CounterState(5.0).grace_frames() == 5);
    CHECK(CounterState(30.0).grace_frames() == 30);
    CHECK(CounterState(2.5).grace_frames() == 3);
    CHECK_THROWS_AS(CounterState(0.0), InputError);
}

TEST_CASE("sector 1 then sector 2 counts once") {
    CounterState st(5.0);
    CHECK(feed(st, 10, {at(10, 7, 5.0)}).empty());
    CHECK(feed(st, 11, {at(11, 7, 16.0)}) == std::vector<TrackId>{7});
    CHECK(st.count() == 1);
    CHECK(st.was_counted(7));

    // same id comes back through both sectors
    feed(st, 20, {at(20, 7, 3.0)});
    CHECK(feed(st, 21, {at(21, 7, 20.0)}).empty());
    CHECK(st.count() == 1);
}

TEST_CASE("a 0.8 s gap at 5 fps is bridged") {
    CounterState st(5.0);
    feed(st, 10, {at(10, 9, 12.0)});
    feed(st, 11);
    feed(st, 12);
    feed(st, 13);
    CHECK(feed(st, 14, {at(14, 9, 18.0)}) == std::vector<TrackId>{9});
    CHECK(st.count() == 1);
}

TEST_CASE("gap at the grace limit counts, one frame more does not") {
    CounterState a(5.0);
    feed(a, 10, {at(10, 1, 12.0)});
    CHECK(feed(a, 15, {at(15, 1, 18.0)}).size() == 1);

    CounterState b(5.0);
    feed(b, 10, {at(10, 1, 12.0)});
    for (std::int64_t f = 11; f <= 15; ++f) feed(b, f);
    CHECK(b.memory_size() == 1);
    CHECK(feed(b, 16, {at(16, 1, 18.0)}).empty());
    CHECK(b.memory_size() == 0);
    CHECK(b.count() == 0);
}

TEST_CASE("first sighting in sector 2 is not counted") {
    CounterState st(5.0);
    CHECK(feed(st, 3, {at(3, 4, 20.0)}).empty());
    CHECK(feed(st, 4, {at(4, 4, 25.0)}).empty());
    CHECK(st.count() == 0);
}

TEST_CASE("several tracks on one frame") {
    CounterState st(5.0);
    feed(st, 0, {at(0, 1, 1.0), at(0, 2, 10.0), at(0, 3, 14.0)});
    auto got = feed(st, 1, {at(1, 3, 16.0), at(1, 2, 15.0), at(1, 1, 4.0)});
    CHECK(got == std::vector<TrackId>{3, 2});
    CHECK(st.count() == 2);
}

TEST_CASE("counter rejects foreign observations") {
    CounterState st(5.0);
    std::vector<TrackObservation> wrong_lane{{0, 1, "B_cw", 3.0}};
    CHECK_THROWS_AS(update_counter(st, kLayout, wrong_lane, 0), InputError);
    std::vector<TrackObservation> wrong_frame{at(4, 1, 3.0)};
    CHECK_THROWS_AS(update_counter(st, kLayout, wrong_frame, 5), InputError);
}

TEST_CASE("realtime flow") {
    CHECK(realtime_flow({"A", 0, 60, 30}) == doctest::Approx(0.5));
    CHECK(realtime_flow({"A", 5, 65, 0}) == 0.0);
    CHECK(realtime_flow({"A", 0, 62.7, 9}) == doctest::Approx(0.14354).epsilon(1e-4));
    CHECK_THROWS_AS(realtime_flow({"A", 10, 10, 3}), EmptyWindow);
    CHECK_THROWS_AS(realtime_flow({"A", 10, 9, 3}), EmptyWindow);
}

TEST_CASE("virtual camera window and ids") {
    VirtualCameraConfig cfg{"A_cw", 0.0, 50.0, 5.0, 0.0, 0.0, 1};
    VirtualCamera cam(cfg);
    CHECK(cam.observe(std::vector<VehiclePose>{}, 0).empty());
    std::vector<VehiclePose> poses{{1, 0, 10.0}, {2, 3, 20.0}, {3, 0, 49.9}, {4, 0, 50.0},
                                   {5, 0, -1.0}};
    const auto obs = cam.observe(poses, 12);
    REQUIRE(obs.size() == 3);
    CHECK(obs[0].track_id == 1);
    CHECK(obs[1].track_id == 3 * kTrackIdStride + 2);
    CHECK(obs[2].track_id == 3);
    for (const auto& o : obs) {
        CHECK(o.frame_index == 12);
        CHECK(o.lane_id == "A_cw");
    }
}

TEST_CASE("camera dropout is reproducible for a seed") {
    VirtualCameraConfig cfg{"A_cw", 0.0, 50.0, 5.0, 0.5, 0.0, 77};
    std::vector<VehiclePose> poses;
    for (int i = 0; i < 40; ++i) poses.push_back({i, 0, i * 1.2});

    auto sample = [&](std::uint64_t seed, std::uint64_t stream) {
        auto c = cfg;
        c.rng_seed = seed;
        VirtualCamera cam(c, stream);
        std::vector<TrackId> ids;
        for (int f = 0; f < 20; ++f)
            for (const auto& o : cam.observe(poses, f)) ids.push_back(o.track_id);
        return ids;
    };
    const auto a = sample(77, 0);
    CHECK(a == sample(77, 0));
    CHECK(a != sample(78, 0));
    CHECK(a != sample(77, 1));
    // about half survive
    CHECK(a.size() > 300);
    CHECK(a.size() < 500);
}

TEST_CASE("camera rejects invalid config") {
    CHECK_THROWS_AS(VirtualCamera(VirtualCameraConfig{"A", 0, 50, 5, 1.0, 0, 0}), InputError);
    CHECK_THROWS_AS(VirtualCamera(VirtualCameraConfig{"A", 0, 50, 0, 0.1, 0, 0}), InputError);
    CHECK_THROWS_AS(VirtualCamera(VirtualCameraConfig{"A", 50, 50, 5, 0.1, 0, 0}), InputError);
}

TEST_CASE("id switches never produce double counts") {
    VirtualCameraConfig cfg{"A_cw", 0.0, 40.0, 5.0, 0.2, 0.3, 5};
    VirtualCamera cam(cfg);
    CounterState st(5.0);
    std::set<TrackId> seen;
    const double v = 10.0;
    for (std::int64_t f = 0; f < 400; ++f) {
        std::vector<VehiclePose> poses;
        for (int id = 0; id < 40; ++id) {
            const double x = v * (f / 5.0) - id * 25.0;
            if (x > -1 && x < 40) poses.push_back({id, 0, x});
        }
        for (TrackId t : update_counter(st, kLayout, cam.observe(poses, f), f)) {
            CHECK(seen.insert(t).second);
        }
    }
    CHECK(st.count() == static_cast<std::int64_t>(seen.size()));
}
