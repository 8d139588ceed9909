#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/test_util.hpp"
#include "vsyn/tracker.hpp"

using namespace vsyn;

namespace {

Detection det_at(double cx, double cy, int w = 8, int h = 6) {
    Detection d;
    d.box = {static_cast<int>(std::lround(cx - w / 2.0)),
             static_cast<int>(std::lround(cy - h / 2.0)), w, h};
    d.centroid = {cx, cy};
    d.area = w * h;
    return d;
}

}  // namespace

TEST_CASE("displacement is exact for constant velocity in both branches") {
    const Vec2 v{3.0, -1.0};
    for (int len = 2; len <= 30; ++len) {
        std::vector<Vec2> centers;
        for (int i = 0; i < len; ++i) centers.push_back({7.0 + v.x * i, 100.0 + v.y * i});
        const Vec2 d = predict_displacement(centers);
        CHECK(d.x == doctest::Approx(v.x).epsilon(1e-12));
        CHECK(d.y == doctest::Approx(v.y).epsilon(1e-12));
    }
}

TEST_CASE("short-history displacement matches the hand-computed value") {
    // centers (0,0),(1,0),(3,0): (1*1 + 2*2)/(1+2) = 5/3
    const std::vector<Vec2> centers{{0, 0}, {1, 0}, {3, 0}};
    const Vec2 d = predict_displacement(centers);
    CHECK(d.x == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(d.y == doctest::Approx(0.0));
}

TEST_CASE("long-history displacement matches direct evaluation") {
    // velocity (1,0) through i=10, then (2,0)
    std::vector<Vec2> centers{{0, 0}};
    for (int i = 1; i < 15; ++i) {
        const double step = centers.size() < 10 ? 1.0 : 2.0;
        centers.push_back({centers.back().x + step, 0.0});
    }
    REQUIRE(centers.size() == 15);

    // independent evaluation of the recency-weighted mean over the last 9 diffs
    double num = 0.0, den = 0.0;
    const std::size_t i = centers.size();
    for (std::size_t n = 1; n <= 9; ++n) {
        num += (centers[i - n].x - centers[i - n - 1].x) * static_cast<double>(10 - n);
        den += static_cast<double>(n);
    }
    const Vec2 d = predict_displacement(centers);
    CHECK(d.x == doctest::Approx(num / den).epsilon(1e-12));
    CHECK(d.y == doctest::Approx(0.0));
    // weights sum to the denominator, so the estimate is a proper weighted mean
    CHECK(d.x >= 1.0);
    CHECK(d.x <= 2.0);
}

TEST_CASE("fewer than two centers predict no motion") {
    CHECK(predict_displacement(std::vector<Vec2>{}).x == 0.0);
    CHECK(predict_displacement(std::vector<Vec2>{{4, 4}}).x == 0.0);
}

TEST_CASE("predict_center adds the displacement to the last center") {
    Track t;
    t.centers = {{0, 0}, {2, 0}, {4, 0}};
    Vec2 p = predict_center(t);
    CHECK(p.x == doctest::Approx(6.0));
    CHECK(p.y == doctest::Approx(0.0));

    t.centers = {{5, 5}};
    p = predict_center(t);
    CHECK(p.x == doctest::Approx(5.0));
    CHECK(p.y == doctest::Approx(5.0));

    t.centers = {{0, 0}, {1, 0}, {3, 0}};
    p = predict_center(t);
    CHECK(p.x == doctest::Approx(3.0 + 5.0 / 3.0).epsilon(1e-12));

    t.centers.clear();
    CHECK_THROWS(predict_center(t));
}

TEST_CASE("association takes the nearest detection within the gate") {
    const std::vector<Vec2> predictions{{10, 10}};
    const std::vector<double> gates{10.0};
    const std::vector<Detection> dets{det_at(11, 10), det_at(50, 50)};
    const Association a = associate(predictions, gates, dets);
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0] == std::pair{0, 0});
    REQUIRE(a.unmatched_detections.size() == 1);
    CHECK(a.unmatched_detections[0] == 1);
}

TEST_CASE("association with no detections leaves the track unmatched") {
    const std::vector<Vec2> predictions{{10, 10}};
    const std::vector<double> gates{10.0};
    const Association a = associate(predictions, gates, {});
    CHECK(a.matches.empty());
    REQUIRE(a.unmatched_tracks.size() == 1);
}

TEST_CASE("greedy matching picks globally smallest distances first") {
    const std::vector<Vec2> predictions{{0, 0}, {10, 0}};
    const std::vector<double> gates{10.0, 10.0};
    const std::vector<Detection> dets{det_at(1, 0), det_at(9, 0)};
    const Association a = associate(predictions, gates, dets);
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0] == std::pair{0, 0});
    CHECK(a.matches[1] == std::pair{1, 1});

    // cross-check against exhaustive pairings: the greedy pick order is by
    // ascending distance, so (0,0) at distance 1 precedes (1,1) at distance 1
    double d00 = distance(predictions[0], dets[0].centroid);
    double d01 = distance(predictions[0], dets[1].centroid);
    double d10 = distance(predictions[1], dets[0].centroid);
    double d11 = distance(predictions[1], dets[1].centroid);
    CHECK(d00 <= d01);
    CHECK(d11 <= d10);
}

TEST_CASE("one second of consecutive detections confirms a track") {
    Tracker tracker({18, 5, 1.0});  // 18 fps
    TrackEvents last;
    for (int f = 0; f < 18; ++f) {
        last = tracker.step(std::vector<Detection>{det_at(10.0 + 2 * f, 20.0)}, f);
        if (f < 17) CHECK(last.confirmed_ids.empty());
    }
    REQUIRE(last.confirmed_ids.size() == 1);
    CHECK(last.confirmed_ids[0] == 1);
    REQUIRE(tracker.live_tracks().size() == 1);
    CHECK(tracker.live_tracks()[0].state == TrackState::confirmed);
    CHECK(tracker.live_tracks()[0].history.size() == 18);
}

TEST_CASE("a track below the confirmation window never gets an id") {
    Tracker tracker({18, 5, 1.0});
    for (int f = 0; f < 17; ++f) tracker.step(std::vector<Detection>{det_at(10, 10)}, f);
    const TrackEvents events = tracker.step({}, 17);  // one miss kills a tentative track
    REQUIRE(events.terminated.size() == 1);
    CHECK(events.terminated[0].id == 0);
    CHECK(tracker.next_id() == 1);  // no id consumed
    CHECK(tracker.live_tracks().empty());
}

TEST_CASE("confirmed tracks coast through misses and then terminate") {
    Tracker tracker({5, 3, 2.0});
    for (int f = 0; f < 5; ++f) tracker.step(std::vector<Detection>{det_at(10.0 + f, 10)}, f);
    REQUIRE(tracker.live_tracks().size() == 1);
    CHECK(tracker.live_tracks()[0].state == TrackState::confirmed);

    TrackEvents events;
    for (int f = 5; f < 8; ++f) {
        events = tracker.step({}, f);
        CHECK(events.terminated.empty());  // within the coasting budget
    }
    events = tracker.step({}, 8);  // fourth miss exceeds max_misses = 3
    REQUIRE(events.terminated.size() == 1);
    CHECK(events.terminated[0].id == 1);
    CHECK(events.terminated[0].history.size() == 5);  // only real detections
}

TEST_CASE("coasting keeps the prediction advancing for re-association") {
    Tracker tracker({3, 4, 1.5});
    for (int f = 0; f < 5; ++f) tracker.step(std::vector<Detection>{det_at(10.0 + 4 * f, 10, 16, 12)}, f);
    // two missed frames, then the object reappears where motion predicts
    tracker.step({}, 5);
    tracker.step({}, 6);
    const TrackEvents events = tracker.step(std::vector<Detection>{det_at(10.0 + 4 * 7, 10, 16, 12)}, 7);
    CHECK(events.terminated.empty());
    REQUIRE(tracker.live_tracks().size() == 1);
    CHECK(tracker.live_tracks()[0].misses == 0);
    CHECK(tracker.live_tracks()[0].history.size() == 6);
}

TEST_CASE("ids are contiguous and follow confirmation order") {
    Tracker tracker({3, 5, 1.0});
    for (int f = 0; f < 3; ++f) {
        std::vector<Detection> dets{det_at(10.0 + f, 10)};
        if (f >= 1) dets.push_back(det_at(100.0 + f, 80));
        tracker.step(dets, f);
    }
    tracker.step(std::vector<Detection>{det_at(13, 10), det_at(103, 80)}, 3);
    const auto& tracks = tracker.live_tracks();
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].id == 1);  // confirmed one frame earlier
    CHECK(tracks[1].id == 2);
    CHECK(tracks[0].first_frame == 0);
    CHECK(tracks[1].first_frame == 1);
}

TEST_CASE("history frames are consecutive until the first miss") {
    Tracker tracker({4, 5, 1.0});
    for (int f = 0; f < 9; ++f) tracker.step(std::vector<Detection>{det_at(20.0 + f, 30)}, f);
    const auto& track = tracker.live_tracks()[0];
    for (std::size_t i = 0; i < track.history.size(); ++i)
        REQUIRE(track.history[i].first == static_cast<std::int64_t>(i));
    CHECK(track.centers.size() == track.history.size());
}

TEST_CASE("crossing objects keep their identities") {
    // A runs left-to-right at y=40, B right-to-left at y=60; they pass near
    // x=50 where proximity alone would confuse a nearest-center matcher
    Tracker tracker({3, 5, 1.0});
    for (int f = 0; f < 50; ++f) {
        std::vector<Detection> dets;
        dets.push_back(det_at(2.0 * f, 40.0, 10, 8));          // A
        dets.push_back(det_at(100.0 - 2.0 * f, 60.0, 10, 8));  // B
        tracker.step(dets, f);
    }
    const auto& tracks = tracker.live_tracks();
    REQUIRE(tracks.size() == 2);
    // ground truth: id 1 ends at (98,40), id 2 at (2,60)
    for (const auto& t : tracks) {
        REQUIRE(t.state == TrackState::confirmed);
        if (t.id == 1) {
            CHECK(t.centers.back().x == doctest::Approx(98.0));
            CHECK(t.centers.back().y == doctest::Approx(40.0));
        } else {
            CHECK(t.id == 2);
            CHECK(t.centers.back().x == doctest::Approx(2.0));
            CHECK(t.centers.back().y == doctest::Approx(60.0));
        }
    }
}

TEST_CASE("non-monotonic frame indices are rejected") {
    Tracker tracker({3, 5, 1.0});
    tracker.step({}, 5);
    CHECK_THROWS(tracker.step({}, 5));
    CHECK_THROWS(tracker.step({}, 4));
}

TEST_CASE("flush terminates everything") {
    Tracker tracker({2, 5, 1.0});
    for (int f = 0; f < 4; ++f)
        tracker.step(std::vector<Detection>{det_at(10.0 + f, 10), det_at(90.0 - f, 70)}, f);
    const TrackEvents events = tracker.flush();
    CHECK(events.terminated.size() == 2);
    CHECK(tracker.live_tracks().empty());
    for (const auto& t : events.terminated) CHECK(t.state == TrackState::terminated);
}
