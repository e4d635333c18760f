#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "portalens/annotate.hpp"
#include "portalens/error.hpp"

using namespace portalens;
using support::Rng;

namespace {

const SessionConfig kCfg{};

PortalState clutched() {
    PortalState s = initial_state(kCfg);
    return handle_event(s, {0, ev::ClutchDown{}}, kCfg).state;
}

} // namespace

TEST_CASE("pin at an explicit depth lands under the finger") {
    const Dataset ds;
    const PortalState s = clutched();
    const ViewTransform v = effective_view(s, kCfg.camera);
    const Vec3 p = pin_position(s, kCfg.camera, ds, {400, 300}, 2.5);
    const auto q = project_point(v, p);
    REQUIRE(q);
    CHECK(norm(q->screen - Vec2{400, 300}) < 1e-9);
    CHECK(q->depth == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(pin_position(s, kCfg.camera, ds, {400, 300}, 1e6), InputError);
}

TEST_CASE("pin without depth falls back to the middle of the cube span") {
    const Dataset ds;
    const PortalState s = clutched();
    // straight down the axis: the ray enters at z = 1 and leaves at z = 0
    const Vec3 p = pin_position(s, kCfg.camera, ds, {400, 300}, std::nullopt);
    CHECK(norm(p - Vec3{0.5, 0.5, 0.5}) < 1e-12);
}

TEST_CASE("pin snaps to the nearest visible sample, nearer depth on ties") {
    const Dataset ds({{"a", {{0, 0, 0}, {10, 10, 10}}}, {"b", {{5, 5, 5}, {6, 6, 6}}}});
    const PortalState s = clutched();
    const ViewTransform v = effective_view(s, kCfg.camera);
    const Vec3 target = ds.position(1, 0);
    const Vec2 at = project_point(v, target)->screen;
    CHECK(pin_position(s, kCfg.camera, ds, at + Vec2{3, 0}, std::nullopt) == target);
    // hidden by the filter: falls back to the ray span
    PortalState f = s;
    f.filter_value = 0.9;
    CHECK_FALSE(pin_position(f, kCfg.camera, ds, at + Vec2{3, 0}, std::nullopt) == target);
}

TEST_CASE("pins need a clutched view and a ray through the cube") {
    const Dataset ds;
    CHECK_THROWS_AS(pin_position(initial_state(kCfg), kCfg.camera, ds, {400, 300}, std::nullopt), InputError);
    CHECK_THROWS_AS(pin_position(clutched(), kCfg.camera, ds, {2, 2}, std::nullopt), InputError);
}

TEST_CASE("store ids are monotonic per kind") {
    AnnotationStore st;
    CHECK(st.add_pin(PinColor::Red, {0, 0, 0}).id == 1);
    CHECK(st.add_pin(PinColor::Blue, {0, 0, 0}).id == 2);
    CHECK(st.add_stroke(StrokeAnchor::World, {{0, {0, 0, 0}, 1}}).id == 1);
    CHECK_THROWS_AS(st.add_stroke(StrokeAnchor::World, {}), InputError);
    CHECK_THROWS_AS(st.add_stroke(StrokeAnchor::World, {{5, {}, 1}, {4, {}, 1}}), InputError);
    CHECK_THROWS_AS(st.add_stroke(StrokeAnchor::World, {{5, {}, 1.5}}), InputError);
    CHECK(st.add_stroke(StrokeAnchor::World, {{0, {0, 0, 0}, 1}}).id == 2);
    CHECK(st.add_pin(PinColor::Red, {0, 0, 0}).id == 3);
    CHECK_THROWS_AS(st.add_pin(PinColor::Red, {NAN, 0, 0}), InputError);
}

TEST_CASE("bookmark recall reproduces the stored view exactly") {
    Rng rng(61);
    for (int i = 0; i < 50; ++i) {
        PortalState s = initial_state(kCfg);
        s = handle_event(s, {1, ev::PoseSample{support::random_view_pose(rng, s.anchor)}}, kCfg).state;
        s = handle_event(s, {2, ev::ClutchDown{}}, kCfg).state;
        const Vec2 f{rng.uniform(100, 700), rng.uniform(100, 500)};
        s = handle_event(s, {3, ev::PinchStart{f, rng.uniform(0.5, 2)}}, kCfg).state;
        s = handle_event(s, {4, ev::PanUpdate{{rng.uniform(-50, 50), rng.uniform(-50, 50)}}}, kCfg).state;
        s = handle_event(s, {5, ev::ThumbArc{rng.uniform(0, 1)}}, kCfg).state;
        const Mat4 shown = effective_view(s, kCfg.camera).clip;

        AnnotationStore st;
        const Bookmark& b = create_bookmark(st, s, "b", {}, 5);
        PortalState later = handle_event(s, {6, ev::ClutchUp{}}, kCfg).state;
        later = handle_event(later, {7, ev::PoseSample{support::random_view_pose(rng, later.anchor)}}, kCfg).state;
        const PortalState r = recall_bookmark(later, st, b);
        CHECK(r.mode == Mode::Clutched);
        CHECK(effective_view(r, kCfg.camera).clip == shown);
        CHECK(r.filter_value == s.filter_value);
    }
}

TEST_CASE("bookmark in explore captures the live pose without adjustment") {
    PortalState s = initial_state(kCfg);
    s = handle_event(s, {1, ev::PoseSample{Pose::translation({0.1, 0, 0})}}, kCfg).state;
    AnnotationStore st;
    const Bookmark& b = create_bookmark(st, s, "", {});
    CHECK(b.device_pose == Pose::translation({0.1, 0, 0}));
    CHECK(b.pinch_zoom == 1.0);
}

TEST_CASE("bookmarks referencing missing strokes are rejected") {
    AnnotationStore st;
    CHECK_THROWS_AS(create_bookmark(st, clutched(), "x", {7}), InputError);
    Bookmark dangling;
    dangling.id = 3;
    dangling.stroke_ids = {9};
    st.restore(dangling);
    CHECK_THROWS_AS(recall_bookmark(clutched(), st, *st.find_bookmark(3)), InputError);
}

TEST_CASE("nearby_bookmarks matches a brute-force filter") {
    Rng rng(62);
    AnnotationStore st;
    for (int i = 0; i < 100; ++i) {
        Bookmark b;
        b.device_pose = {{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.rotation()};
        st.add_bookmark(b);
    }
    const ProximityConfig cfg;
    for (int k = 0; k < 100; ++k) {
        const Pose q{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.rotation()};
        std::vector<std::pair<double, std::uint64_t>> want;
        bool borderline = false;
        for (const auto& [id, b] : st.bookmarks()) {
            const Vec3 d = b.device_pose.position - q.position;
            const double dist = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
            const double ang = oracle::rotation_angle(b.device_pose.orientation, q.orientation);
            if (std::abs(dist - cfg.radius_m) < 1e-9 || std::abs(ang - cfg.max_angle) < 1e-6) borderline = true;
            if (dist <= cfg.radius_m && ang <= cfg.max_angle) want.push_back({dist, id});
        }
        if (borderline) continue;
        std::sort(want.begin(), want.end());
        const auto hits = nearby_bookmarks(st, q, cfg);
        REQUIRE(hits.size() == want.size());
        for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].id == want[i].second);
    }
    CHECK_THROWS_AS(nearby_bookmarks(st, Pose{}, ProximityConfig{0.0}), InputError);
}

TEST_CASE("nearby ties break by id") {
    AnnotationStore st;
    Bookmark b;
    b.device_pose = Pose::translation({0.1, 0, 0});
    st.add_bookmark(b);
    b.device_pose = Pose::translation({-0.1, 0, 0});
    st.add_bookmark(b);
    const auto hits = nearby_bookmarks(st, Pose{});
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].id == 1);
    CHECK(hits[1].id == 2);
}
