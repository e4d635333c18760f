#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "portalens/error.hpp"
#include "portalens/geometry.hpp"

using namespace portalens;
using support::Rng;

TEST_CASE("quaternion rotation matches the rotation matrix") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Quat q = rng.rotation();
        const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        const auto r = oracle::rot(q.w, q.x, q.y, q.z);
        const Vec3 got = q.rotate(v);
        CHECK(got.x == doctest::Approx(r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z).epsilon(1e-12));
        CHECK(got.z == doctest::Approx(r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z).epsilon(1e-12));
    }
}

TEST_CASE("axis-angle: 90 degrees about +Y takes +X to -Z") {
    const Quat q = Quat::from_axis_angle({0, 1, 0}, std::numbers::pi / 2);
    const Vec3 v = q.rotate({1, 0, 0});
    CHECK(v.x == doctest::Approx(0).epsilon(1e-15));
    CHECK(v.z == doctest::Approx(-1));
}

TEST_CASE("slerp") {
    Rng rng(2);
    SUBCASE("endpoints are returned exactly") {
        const Quat a = rng.rotation(), b = rng.rotation();
        CHECK(slerp(a, b, 0.0) == a);
        CHECK(slerp(a, b, 1.0) == b);
    }
    SUBCASE("angle splits proportionally, basis vectors stay orthonormal") {
        for (int i = 0; i < 200; ++i) {
            const Quat a = rng.rotation(), b = rng.rotation();
            const double u = rng.uniform(0, 1);
            const Quat m = slerp(a, b, u);
            const double total = oracle::relative_angle(a, b);
            CHECK(std::abs(oracle::relative_angle(a, m) - u * total) < 1e-9);
            CHECK(std::abs(oracle::relative_angle(m, b) - (1 - u) * total) < 1e-9);
            const Vec3 x = m.rotate({1, 0, 0}), y = m.rotate({0, 1, 0}), z = m.rotate({0, 0, 1});
            CHECK(std::abs(norm(x) - 1) < 1e-9);
            CHECK(std::abs(dot(x, y)) < 1e-9);
            CHECK(norm(cross(x, y) - z) < 1e-9);
        }
    }
    SUBCASE("takes the shorter arc across the double cover") {
        const Quat a = Quat::identity();
        const Quat b = Quat::from_axis_angle({0, 0, 1}, 0.5);
        const Quat nb{-b.w, -b.x, -b.y, -b.z};
        const Quat m1 = slerp(a, b, 0.5), m2 = slerp(a, nb, 0.5);
        CHECK(geodesic_angle(m1, m2) < 1e-9);
        CHECK(geodesic_angle(a, m1) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("basis-vector check against a hand case") {
        // 90 degrees about Z at u = 1/2 is 45 degrees: X -> (1,1,0)/sqrt2
        const Quat m = slerp(Quat::identity(), Quat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2), 0.5);
        const Vec3 x = m.rotate({1, 0, 0});
        CHECK(std::abs(x.x - std::sqrt(0.5)) < 1e-9);
        CHECK(std::abs(x.y - std::sqrt(0.5)) < 1e-9);
        CHECK(std::abs(x.z) < 1e-9);
    }
}

TEST_CASE("quat_from_basis inverts the rotation matrix") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Quat q = rng.rotation();
        const Quat r = quat_from_basis(q.rotate({1, 0, 0}), q.rotate({0, 1, 0}), q.rotate({0, 0, 1}));
        CHECK(geodesic_angle(q, r) < 1e-7);
    }
}

TEST_CASE("pose and similarity composition") {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        const Pose a{{rng.normal(), rng.normal(), rng.normal()}, rng.rotation()};
        const Pose b{{rng.normal(), rng.normal(), rng.normal()}, rng.rotation()};
        const Vec3 p{rng.normal(), rng.normal(), rng.normal()};
        CHECK(norm(compose(a, b).apply(p) - a.apply(b.apply(p))) < 1e-12);
        CHECK(norm(inverse(a).apply(a.apply(p)) - p) < 1e-12);
        const Similarity s{rng.rotation(), {rng.normal(), rng.normal(), rng.normal()}, rng.uniform(0.1, 3)};
        CHECK(norm(inverse(s).apply(s.apply(p)) - p) < 1e-11);
    }
}

TEST_CASE("view_from_pose equals the explicit matrix chain") {
    Rng rng(5);
    const CameraParams cam;
    for (int i = 0; i < 200; ++i) {
        const AnchorFrame anchor{{{rng.normal(), rng.normal(), rng.normal()}, rng.rotation()}, rng.uniform(0.1, 2)};
        const Pose device{{rng.normal(), rng.normal(), rng.normal()}, rng.rotation()};
        const ViewTransform v = view_from_pose(device, anchor, cam);
        const auto m = oracle::clip_matrix(device, anchor, cam);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) CHECK(std::abs(v.clip(r, c) - m[r][c]) < 1e-9 * (1 + std::abs(m[r][c])));
    }
}

TEST_CASE("projection, unprojection and depth agree with the oracle") {
    Rng rng(6);
    const CameraParams cam;
    const AnchorFrame anchor{Pose::translation({-0.25, -0.25, -1.25}), 0.5};
    for (int i = 0; i < 200; ++i) {
        const Pose device = support::random_view_pose(rng, anchor);
        const ViewTransform v = view_from_pose(device, anchor, cam);
        const auto clip = oracle::clip_matrix(device, anchor, cam);
        const Vec3 p = rng.in_cube();
        const auto got = project_point(v, p);
        const auto want = oracle::project(clip, cam, anchor.scale, p);
        REQUIRE(got.has_value());
        CHECK(norm(got->screen - want.screen) < 1e-9);
        CHECK(std::abs(got->depth - want.depth) < 1e-12);

        const Vec3 back = point_at_depth(v, got->screen, got->depth);
        CHECK(norm(back - p) < 1e-9);
        if (got->screen.x >= 0 && got->screen.x <= cam.viewport_w && got->screen.y >= 0 &&
            got->screen.y <= cam.viewport_h) {
            const Ray ray = unproject_ray(v, got->screen);
            const Vec3 d = p - ray.origin;
            CHECK(norm(cross(d, ray.direction)) < 1e-9);
            CHECK(dot(d, ray.direction) > 0);
        }
    }
}

TEST_CASE("project_point rejects points behind the camera") {
    const AnchorFrame anchor{Pose::translation({-0.25, -0.25, -1.25}), 0.5};
    const ViewTransform v = view_from_pose(Pose::identity(), anchor, CameraParams{});
    CHECK(project_point(v, {0.5, 0.5, 0.5}).has_value());
    // data z = 4 puts the point at physical z = +0.75, behind the eye
    CHECK_FALSE(project_point(v, {0.5, 0.5, 4.0}).has_value());
}

TEST_CASE("cube centre projects to the viewport centre for the default framing") {
    const AnchorFrame anchor{Pose::translation({-0.25, -0.25, -1.25}), 0.5};
    const ViewTransform v = view_from_pose(Pose::identity(), anchor, CameraParams{});
    const auto p = project_point(v, {0.5, 0.5, 0.5});
    REQUIRE(p);
    CHECK(p->screen.x == doctest::Approx(400));
    CHECK(p->screen.y == doctest::Approx(300));
    // eye at origin, centre at z = -1 m, 0.5 m per unit -> 2 data units
    CHECK(p->depth == doctest::Approx(2.0));
}

TEST_CASE("unproject_ray outside the viewport throws") {
    const ViewTransform v = view_from_pose(Pose::identity(), AnchorFrame{}, CameraParams{});
    CHECK_THROWS_AS(unproject_ray(v, {-1, 10}), InputError);
    CHECK_THROWS_AS(unproject_ray(v, {10, 601}), InputError);
}

TEST_CASE("ray against the unit cube") {
    const auto hit = intersect_unit_cube({{0.5, 0.5, -1}, {0, 0, 1}});
    REQUIRE(hit);
    CHECK((*hit)[0] == doctest::Approx(1));
    CHECK((*hit)[1] == doctest::Approx(2));
    CHECK_FALSE(intersect_unit_cube({{2, 2, -1}, {0, 0, 1}}));
}

TEST_CASE("camera validation") {
    CameraParams c;
    CHECK_NOTHROW(c.validate());
    c.vertical_fov = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.near = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.viewport_w = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
}
