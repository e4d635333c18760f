#pragma once

// Random inputs shared by the unit and acceptance tests.

#include "oracles.hpp"

#include "portalens/dataset.hpp"
#include "portalens/geometry.hpp"
#include "portalens/selection.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace support {

using namespace portalens;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }

    Vec3 unit_vector() {
        Vec3 v{normal(), normal(), normal()};
        return portalens::normalized(v);
    }
    Quat rotation() {
        Quat q{normal(), normal(), normal(), normal()};
        return q.normalized();
    }
    Vec3 in_cube() { return {uniform(0, 1), uniform(0, 1), uniform(0, 1)}; }
};

/// Random-walk trajectories, `count` of them with [lo, hi] samples each.
inline std::vector<Trajectory> random_trajectories(Rng& rng, int count, int lo, int hi) {
    std::vector<Trajectory> out;
    for (int k = 0; k < count; ++k) {
        Trajectory tr{"traj" + std::to_string(1000 + k), {}};
        double x = rng.uniform(-100, 100), y = rng.uniform(-100, 100), t = rng.uniform(0, 50);
        const int n = rng.integer(lo, hi);
        for (int i = 0; i < n; ++i) {
            tr.samples.push_back({x, y, t});
            x += rng.normal() * 4.0;
            y += rng.normal() * 4.0;
            t += rng.uniform(0.1, 2.0);
        }
        out.push_back(std::move(tr));
    }
    return out;
}

inline std::shared_ptr<const Dataset> random_dataset(Rng& rng, int count, int lo, int hi) {
    return std::make_shared<const Dataset>(random_trajectories(rng, count, lo, hi));
}

/// Device pose at `dist` metres from the anchored cube centre, looking at it.
inline Pose looking_at_cube(const AnchorFrame& anchor, Vec3 dir, double dist) {
    const Vec3 centre = anchor.to_similarity().apply({0.5, 0.5, 0.5});
    const Vec3 z = portalens::normalized(dir);
    Vec3 up{0, 1, 0};
    if (norm(cross(up, z)) < 1e-3) up = {1, 0, 0};
    const Vec3 x = portalens::normalized(cross(up, z));
    const Vec3 y = cross(z, x);
    return {centre + dist * z, quat_from_basis(x, y, z)};
}

inline Pose random_view_pose(Rng& rng, const AnchorFrame& anchor) {
    Pose p = looking_at_cube(anchor, rng.unit_vector(), rng.uniform(0.7, 1.6));
    // small jitter so views are not exactly centred
    p.orientation = (Quat::from_axis_angle(rng.unit_vector(), rng.uniform(0, 0.15)) * p.orientation).normalized();
    return p;
}

/// Star-shaped polygon around `c`.
inline std::vector<Vec2> star_polygon(Rng& rng, Vec2 c, int n, double rmin, double rmax) {
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0, 2 * std::numbers::pi));
    std::sort(angles.begin(), angles.end());
    std::vector<Vec2> poly;
    for (double a : angles) {
        const double r = rng.uniform(rmin, rmax);
        poly.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return poly;
}

inline oracle::Lasso random_lasso(Rng& rng, const AnchorFrame& anchor, const CameraParams& cam = {}) {
    oracle::Lasso l{random_view_pose(rng, anchor), anchor, cam, {}};
    const Vec2 c{rng.uniform(0.3, 0.7) * cam.viewport_w, rng.uniform(0.3, 0.7) * cam.viewport_h};
    l.polygon = star_polygon(rng, c, rng.integer(3, 12), 15, 260);
    return l;
}

inline LassoVolume to_volume(const oracle::Lasso& l) {
    return make_lasso(l.polygon, view_from_pose(l.device, l.anchor, l.cam));
}

inline TubeSelector random_tube(Rng& rng) {
    TubeSelector t;
    const int n = rng.integer(2, 6);
    Vec3 p = rng.in_cube();
    for (int i = 0; i < n; ++i) {
        t.control_points.push_back(p);
        p = p + rng.uniform(0.05, 0.4) * rng.unit_vector();
    }
    t.radius = rng.uniform(0.005, 0.15);
    return t;
}

inline oracle::Matches to_matches(const SelectionResult& r) {
    oracle::Matches m;
    for (const auto& e : r.entries) {
        auto& v = m[e.id];
        for (const auto& range : e.ranges)
            for (std::uint32_t i = range.first; i <= range.last; ++i) v.push_back(i);
    }
    return m;
}

/// a is a subset of b
inline bool subset(const oracle::Matches& a, const oracle::Matches& b) {
    for (const auto& [id, v] : a) {
        const auto it = b.find(id);
        if (it == b.end()) return false;
        if (!std::includes(it->second.begin(), it->second.end(), v.begin(), v.end())) return false;
    }
    return true;
}

inline std::array<Vec3, 8> cube_corners() {
    std::array<Vec3, 8> c;
    for (int i = 0; i < 8; ++i) c[std::size_t(i)] = {double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)};
    return c;
}

} // namespace support
