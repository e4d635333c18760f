#include "doctest.h"
#include "support.hpp"

#include "portalens/error.hpp"
#include "portalens/session.hpp"

using namespace portalens;
using support::Rng;

namespace {

const SessionConfig kCfg{};

PortalState fold(PortalState s, const std::vector<InputEvent>& evs, const SessionConfig& cfg = kCfg) {
    for (const auto& e : evs) s = handle_event(s, e, cfg).state;
    return s;
}

Mat4 view_of(const PortalState& s) { return effective_view(s, kCfg.camera).clip; }

double max_corner_shift(const ViewTransform& a, const ViewTransform& b) {
    double worst = 0.0;
    for (const Vec3& c : support::cube_corners()) {
        const auto pa = project_point(a, c), pb = project_point(b, c);
        if (!pa || !pb) return INFINITY;
        worst = std::max(worst, norm(pa->screen - pb->screen));
    }
    return worst;
}

} // namespace

TEST_CASE("explore follows the pose, clutch freezes it") {
    PortalState s = initial_state(kCfg);
    const Pose p1 = Pose::translation({0.1, 0, 0});
    auto tr = handle_event(s, {1, ev::PoseSample{p1}}, kCfg);
    REQUIRE(tr.effects.size() == 1);
    CHECK(tr.effects[0].kind == "VIEW");
    s = tr.state;
    CHECK(view_of(s) == view_from_pose(p1, s.anchor, kCfg.camera).clip);

    tr = handle_event(s, {2, ev::ClutchDown{}}, kCfg);
    s = tr.state;
    CHECK(s.mode == Mode::Clutched);
    CHECK(s.frozen_device_pose == p1);
    const Mat4 frozen = view_of(s);

    tr = handle_event(s, {3, ev::PoseSample{Pose::translation({0.5, 0.2, 0})}}, kCfg);
    CHECK(tr.effects.empty());
    CHECK(view_of(tr.state) == frozen);
}

TEST_CASE("out-of-order timestamps are rejected") {
    PortalState s = fold(initial_state(kCfg), {{10, ev::ClutchDown{}}});
    CHECK_THROWS_AS(handle_event(s, {9, ev::ClutchUp{}}, kCfg), InputError);
    CHECK_NOTHROW(handle_event(s, {10, ev::ClutchUp{}}, kCfg));
}

TEST_CASE("pinch and pan are ignored in explore with a warning") {
    const PortalState s = initial_state(kCfg);
    for (EventPayload p : {EventPayload{ev::PinchStart{{400, 300}, 2}}, EventPayload{ev::PanUpdate{{5, 5}}}}) {
        const auto tr = handle_event(s, {1, p}, kCfg);
        REQUIRE(tr.effects.size() == 1);
        CHECK(tr.effects[0].kind == "WARN");
        CHECK(tr.state.pinch_zoom == 1.0);
    }
}

TEST_CASE("tool events forward only while clutched") {
    PortalState s = initial_state(kCfg);
    auto tr = handle_event(s, {1, ev::LassoPoint{{1, 1}}}, kCfg);
    CHECK_FALSE(tr.forward);
    CHECK(tr.effects.at(0).kind == "WARN");
    s = fold(s, {{2, ev::ClutchDown{}}});
    CHECK(handle_event(s, {3, ev::LassoPoint{{1, 1}}}, kCfg).forward);
    CHECK(handle_event(s, {3, ev::BookmarkCreate{"x"}}, kCfg).forward);
}

TEST_CASE("explore view with zoom 1 and no pan is the raw pose view") {
    Rng rng(31);
    PortalState s = initial_state(kCfg);
    const Pose p = support::random_view_pose(rng, s.anchor);
    s = fold(s, {{1, ev::PoseSample{p}}});
    CHECK(view_of(s) == view_from_pose(p, s.anchor, kCfg.camera).clip);
}

TEST_CASE("clutched zoom about the centre doubles offsets on the pivot plane") {
    // Pinch is a world-space scale about the plane through the cube centre
    // orthogonal to the view axis, so the doubling holds exactly there.
    PortalState s = fold(initial_state(kCfg), {{1, ev::ClutchDown{}}, {2, ev::PinchStart{{400, 300}, 1}},
                                               {3, ev::PinchUpdate{{400, 300}, 2}}});
    CHECK(s.pinch_zoom == 2.0);
    const ViewTransform before = view_from_pose(Pose::identity(), s.anchor, kCfg.camera);
    const ViewTransform after = effective_view(s, kCfg.camera);
    for (Vec3 p : {Vec3{0.1, 0.5, 0.5}, Vec3{0.9, 0.2, 0.5}, Vec3{0.5, 0.95, 0.5}}) {
        const auto a = project_point(before, p), b = project_point(after, p);
        REQUIRE(a);
        REQUIRE(b);
        const Vec2 c{400, 300};
        CHECK(norm((b->screen - c) - 2.0 * (a->screen - c)) < 1e-9);
    }
}

TEST_CASE("off-centre pinch focus is a fixed point") {
    Rng rng(32);
    for (int i = 0; i < 50; ++i) {
        PortalState s = initial_state(kCfg);
        s = fold(s, {{1, ev::PoseSample{support::random_view_pose(rng, s.anchor)}}, {2, ev::ClutchDown{}}});
        const ViewTransform before = effective_view(s, kCfg.camera);
        const Vec2 f{rng.uniform(100, 700), rng.uniform(100, 500)};
        const double k = rng.uniform(0.5, 3);
        s = fold(s, {{3, ev::PinchStart{f, 1}}, {4, ev::PinchUpdate{f, k}}});
        const ViewTransform after = effective_view(s, kCfg.camera);
        // Points under f stay under f. Strong zoom can push near ones behind the eye.
        int seen = 0;
        for (double d : {1.0, 2.0, 3.5}) {
            const auto q = project_point(after, point_at_depth(before, f, d));
            if (!q) continue;
            ++seen;
            CHECK(norm(q->screen - f) < 1e-6);
        }
        CHECK(seen > 0);
    }
}

TEST_CASE("release without motion or adjustment leaves the anchor unchanged") {
    PortalState s = initial_state(kCfg);
    const AnchorFrame a0 = s.anchor;
    s = fold(s, {{1, ev::ClutchDown{}}, {2, ev::ClutchUp{}}});
    CHECK(s.mode == Mode::Explore);
    CHECK(norm(s.anchor.pose.position - a0.pose.position) < 1e-12);
    CHECK(geodesic_angle(s.anchor.pose.orientation, a0.pose.orientation) < 1e-12);
    CHECK(std::abs(s.anchor.scale - a0.scale) < 1e-12);
}

TEST_CASE("release is continuous after device motion") {
    PortalState s = fold(initial_state(kCfg), {{1, ev::ClutchDown{}}, {2, ev::PoseSample{Pose::translation({0.3, 0, 0})}}});
    const ViewTransform before = effective_view(s, kCfg.camera);
    s = fold(s, {{3, ev::ClutchUp{}}});
    CHECK(max_corner_shift(before, effective_view(s, kCfg.camera)) < 1e-3);
}

TEST_CASE("pinch 2x at centre doubles anchor.scale and stays continuous") {
    PortalState s = fold(initial_state(kCfg), {{1, ev::ClutchDown{}}, {2, ev::PinchStart{{400, 300}, 2}}});
    const ViewTransform before = effective_view(s, kCfg.camera);
    const double scale0 = s.anchor.scale;
    s = fold(s, {{3, ev::PinchEnd{}}, {4, ev::ClutchUp{}}});
    CHECK(s.anchor.scale == doctest::Approx(2 * scale0).epsilon(1e-12));
    CHECK(s.pinch_zoom == 1.0);
    CHECK(s.pan_offset.x == 0.0);
    CHECK(max_corner_shift(before, effective_view(s, kCfg.camera)) < 1e-3);
}

TEST_CASE("pan during a pinch gesture is kept") {
    PortalState s = fold(initial_state(kCfg), {{1, ev::ClutchDown{}}, {2, ev::PinchStart{{400, 300}, 1}},
                                               {3, ev::PanUpdate{{10, 0}}}, {4, ev::PinchUpdate{{400, 300}, 2}}});
    CHECK(s.pan_offset.x == 10.0);
    CHECK(s.pinch_zoom == 2.0);
}

TEST_CASE("release_clutch in explore is a no-op with a warning") {
    const PortalState s = initial_state(kCfg);
    const auto tr = release_clutch(s, kCfg.camera);
    CHECK(tr.state.mode == Mode::Explore);
    CHECK(tr.effects.at(0).kind == "WARN");
}

TEST_CASE("toggle clutch") {
    SessionConfig cfg;
    cfg.clutch_toggle = true;
    PortalState s = initial_state(cfg);
    s = fold(s, {{1, ev::ClutchDown{}}, {2, ev::ClutchUp{}}}, cfg);
    CHECK(s.mode == Mode::Clutched);
    s = fold(s, {{3, ev::ClutchDown{}}}, cfg);
    CHECK(s.mode == Mode::Explore);
}

TEST_CASE("filter") {
    PortalState s = initial_state(kCfg);
    auto tr = set_filter(s, 0.5);
    CHECK(tr.state.filter_value == 0.5);
    tr = set_filter(s, 1.5);
    CHECK(tr.state.filter_value == 1.0);
    CHECK(tr.effects.at(0).kind == "WARN");
    tr = set_filter(s, -0.1);
    CHECK(tr.state.filter_value == 0.0);
    s = fold(s, {{1, ev::ThumbArc{0.25}}});
    CHECK(s.filter_value == 0.25);
}

TEST_CASE("random event streams keep the state valid and are deterministic") {
    Rng rng(33);
    std::vector<InputEvent> evs;
    std::int64_t t = 0;
    for (int i = 0; i < 1000; ++i) {
        t += rng.integer(0, 20);
        switch (rng.integer(0, 8)) {
        case 0: evs.push_back({t, ev::ClutchDown{}}); break;
        case 1: evs.push_back({t, ev::ClutchUp{}}); break;
        case 2: evs.push_back({t, ev::PinchStart{{rng.uniform(0, 800), rng.uniform(0, 600)}, rng.uniform(0.5, 2)}}); break;
        case 3: evs.push_back({t, ev::PinchUpdate{{rng.uniform(0, 800), rng.uniform(0, 600)}, rng.uniform(0.5, 2)}}); break;
        case 4: evs.push_back({t, ev::PanUpdate{{rng.uniform(-20, 20), rng.uniform(-20, 20)}}}); break;
        case 5: evs.push_back({t, ev::ThumbArc{rng.uniform(-0.2, 1.2)}}); break;
        case 6: evs.push_back({t, ev::PinchEnd{}}); break;
        default: {
            PortalState tmp = initial_state(kCfg);
            evs.push_back({t, ev::PoseSample{support::random_view_pose(rng, tmp.anchor)}});
        }
        }
    }
    std::vector<Effect> log1, log2;
    PortalState a = initial_state(kCfg), b = initial_state(kCfg);
    for (const auto& e : evs) {
        auto ta = handle_event(a, e, kCfg);
        auto tb = handle_event(b, e, kCfg);
        a = ta.state, b = tb.state;
        log1.insert(log1.end(), ta.effects.begin(), ta.effects.end());
        log2.insert(log2.end(), tb.effects.begin(), tb.effects.end());
        CHECK(a.pinch_zoom > 0.0);
        CHECK(a.filter_value >= 0.0);
        CHECK(a.filter_value <= 1.0);
        if (a.mode == Mode::Explore) {
            CHECK(a.pinch_zoom == 1.0);
            CHECK(a.pan_offset.x == 0.0);
        }
    }
    CHECK(log1 == log2);
    CHECK(view_of(a) == view_of(b));
}
