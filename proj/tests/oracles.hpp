#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the engine's geometry, selection or kernel code: projection goes through an
// explicit 4x4 matrix chain with a generic inverse, point-in-polygon is a
// textbook crossing count, selections are brute force over every sample.

#include "portalens/dataset.hpp"
#include "portalens/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using portalens::Vec2;
using portalens::Vec3;

using M4 = std::array<std::array<double, 4>, 4>;

inline M4 mul(const M4& a, const M4& b) {
    M4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline M4 eye() {
    M4 r{};
    for (int i = 0; i < 4; ++i) r[i][i] = 1.0;
    return r;
}

/// Rotation matrix of a unit quaternion (w, x, y, z), standard formula.
inline std::array<std::array<double, 3>, 3> rot(double w, double x, double y, double z) {
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

/// T * R * S as a 4x4.
inline M4 trs(Vec3 t, const portalens::Quat& q, double s) {
    const auto r = rot(q.w, q.x, q.y, q.z);
    M4 m = eye();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = r[i][j] * s;
    m[0][3] = t.x, m[1][3] = t.y, m[2][3] = t.z;
    return m;
}

/// Gauss-Jordan with partial pivoting.
inline M4 inverse(M4 a) {
    M4 inv = eye();
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        std::swap(inv[c], inv[p]);
        const double d = a[c][c];
        for (int j = 0; j < 4; ++j) a[c][j] /= d, inv[c][j] /= d;
        for (int r = 0; r < 4; ++r) {
            if (r == c) continue;
            const double f = a[r][c];
            for (int j = 0; j < 4; ++j) a[r][j] -= f * a[c][j], inv[r][j] -= f * inv[c][j];
        }
    }
    return inv;
}

inline M4 perspective(const portalens::CameraParams& cam) {
    const double f = 1.0 / std::tan(cam.vertical_fov / 2.0);
    const double n = cam.near, fa = cam.far;
    M4 p{};
    p[0][0] = f / (double(cam.viewport_w) / double(cam.viewport_h));
    p[1][1] = f;
    p[2][2] = (fa + n) / (n - fa);
    p[2][3] = 2.0 * fa * n / (n - fa);
    p[3][2] = -1.0;
    return p;
}

/// Full clip matrix: perspective * inverse(device) * anchor(T R S).
inline M4 clip_matrix(const portalens::Pose& device, const portalens::AnchorFrame& anchor,
                      const portalens::CameraParams& cam) {
    const M4 model = trs(anchor.pose.position, anchor.pose.orientation, anchor.scale);
    const M4 view = inverse(trs(device.position, device.orientation, 1.0));
    return mul(oracle::perspective(cam), mul(view, model));
}

struct Proj {
    Vec2 screen;
    double w;     ///< clip w, metres
    double depth; ///< w / scale, data units
};

inline Proj project(const M4& clip, const portalens::CameraParams& cam, double scale, Vec3 p) {
    const double v[4] = {p.x, p.y, p.z, 1.0};
    double c[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) c[i] += clip[i][k] * v[k];
    return {{(c[0] / c[3] + 1.0) * 0.5 * cam.viewport_w, (1.0 - c[1] / c[3]) * 0.5 * cam.viewport_h},
            c[3], c[3] / scale};
}

/// Crossing-number point-in-polygon; points on an edge count as inside.
inline bool pip(const std::vector<Vec2>& poly, Vec2 p) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cr == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
            std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y))
            return true;
    }
    int crossings = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const bool up = a.y <= p.y && b.y > p.y;
        const bool down = b.y <= p.y && a.y > p.y;
        if (!up && !down) continue;
        const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (p.x < x) ++crossings;
    }
    return crossings % 2 == 1;
}

/// A frozen lasso described by the pose it was drawn from.
struct Lasso {
    portalens::Pose device;
    portalens::AnchorFrame anchor;
    portalens::CameraParams cam;
    std::vector<Vec2> polygon;
};

inline bool in_lasso(const Lasso& l, const M4& clip, Vec3 p) {
    const Proj q = project(clip, l.cam, l.anchor.scale, p);
    if (!(q.w > 0.0)) return false;
    if (q.depth < l.cam.near / l.anchor.scale || q.depth > l.cam.far / l.anchor.scale) return false;
    return pip(l.polygon, q.screen);
}

/// id -> matched sample indices (sorted)
using Matches = std::map<std::string, std::vector<std::uint32_t>>;

inline bool visible(double t, double filter) { return t <= 1.0 - filter; }

inline Vec3 sample_pos(const portalens::Dataset& ds, std::size_t t, std::size_t i) {
    return ds.position(t, i);
}

inline void add(Matches& m, const std::string& id, std::uint32_t i) {
    auto& v = m[id];
    if (std::find(v.begin(), v.end(), i) == v.end()) v.push_back(i);
}

inline void finish(Matches& m) {
    for (auto& [id, v] : m) std::sort(v.begin(), v.end());
}

/// Every sample, plus every interior point at u = k/n of every segment (which
/// marks both endpoints), tested against the lasso.
inline Matches lasso(const portalens::Dataset& ds, const Lasso& l, int n, double filter) {
    const M4 clip = clip_matrix(l.device, l.anchor, l.cam);
    Matches m;
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
        const auto& tr = ds.trajectory(t);
        const std::size_t count = tr.samples.size();
        for (std::size_t i = 0; i < count; ++i) {
            const Vec3 p = sample_pos(ds, t, i);
            if (visible(p.y, filter) && in_lasso(l, clip, p)) add(m, tr.id, std::uint32_t(i));
        }
        for (std::size_t i = 0; i + 1 < count; ++i) {
            const Vec3 a = sample_pos(ds, t, i), b = sample_pos(ds, t, i + 1);
            for (int k = 1; k < n; ++k) {
                const double u = double(k) / double(n);
                const Vec3 p = a + u * (b - a);
                if (visible(p.y, filter) && in_lasso(l, clip, p)) {
                    add(m, tr.id, std::uint32_t(i));
                    add(m, tr.id, std::uint32_t(i + 1));
                    break;
                }
            }
        }
    }
    finish(m);
    return m;
}

/// Per sample: a sample is selected when it lies in every lasso.
inline Matches intersect_per_sample(const portalens::Dataset& ds, const std::vector<Lasso>& ls,
                                    double filter) {
    std::vector<M4> clips;
    for (const auto& l : ls) clips.push_back(clip_matrix(l.device, l.anchor, l.cam));
    Matches m;
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
        const auto& tr = ds.trajectory(t);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const Vec3 p = sample_pos(ds, t, i);
            if (!visible(p.y, filter)) continue;
            bool all = true;
            for (std::size_t k = 0; k < ls.size() && all; ++k) all = in_lasso(ls[k], clips[k], p);
            if (all) add(m, tr.id, std::uint32_t(i));
        }
    }
    finish(m);
    return m;
}

/// Per trajectory: every lasso holds at least one sample; the matched samples
/// are those in any lasso.
inline Matches intersect_per_trajectory(const portalens::Dataset& ds, const std::vector<Lasso>& ls,
                                        double filter) {
    std::vector<M4> clips;
    for (const auto& l : ls) clips.push_back(clip_matrix(l.device, l.anchor, l.cam));
    Matches m;
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
        const auto& tr = ds.trajectory(t);
        std::vector<std::uint32_t> any;
        std::vector<bool> hit(ls.size(), false);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const Vec3 p = sample_pos(ds, t, i);
            if (!visible(p.y, filter)) continue;
            bool in_any = false;
            for (std::size_t k = 0; k < ls.size(); ++k)
                if (in_lasso(ls[k], clips[k], p)) hit[k] = true, in_any = true;
            if (in_any) any.push_back(std::uint32_t(i));
        }
        if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }) && !any.empty())
            m[tr.id] = any;
    }
    return m;
}

inline double point_segment_distance(Vec3 p, Vec3 a, Vec3 b) {
    const Vec3 ab = b - a;
    const double len2 = portalens::dot(ab, ab);
    double u = len2 > 0.0 ? portalens::dot(p - a, ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return portalens::norm(p - (a + u * ab));
}

inline Matches tube(const portalens::Dataset& ds, const std::vector<Vec3>& pts, double radius,
                    double filter) {
    Matches m;
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
        const auto& tr = ds.trajectory(t);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const Vec3 p = sample_pos(ds, t, i);
            if (!visible(p.y, filter)) continue;
            double best = INFINITY;
            for (std::size_t s = 0; s + 1 < pts.size(); ++s)
                best = std::min(best, point_segment_distance(p, pts[s], pts[s + 1]));
            if (best <= radius) add(m, tr.id, std::uint32_t(i));
        }
    }
    finish(m);
    return m;
}

/// Brute-force segment/box overlap list.
inline std::vector<portalens::SegmentRef> segments_overlapping(const portalens::Dataset& ds,
                                                               const portalens::Aabb& box) {
    std::vector<portalens::SegmentRef> out;
    for (std::uint32_t t = 0; t < ds.trajectory_count(); ++t)
        for (std::uint32_t s = 0; s + 1 < ds.trajectory(t).samples.size(); ++s) {
            const Vec3 a = ds.position(t, s), b = ds.position(t, s + 1);
            const bool hit = std::min(a.x, b.x) <= box.hi.x && std::max(a.x, b.x) >= box.lo.x &&
                             std::min(a.y, b.y) <= box.hi.y && std::max(a.y, b.y) >= box.lo.y &&
                             std::min(a.z, b.z) <= box.hi.z && std::max(a.z, b.z) >= box.lo.z;
            if (hit) out.push_back({t, s});
        }
    return out;
}

/// Rotation angle between two unit quaternions through their matrices.
inline double rotation_angle(const portalens::Quat& a, const portalens::Quat& b) {
    const auto ra = rot(a.w, a.x, a.y, a.z), rb = rot(b.w, b.x, b.y, b.z);
    double tr = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) tr += ra[k][i] * rb[k][i];
    return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

/// Same angle from the relative quaternion conj(a) * b, written out by hand;
/// accurate for small angles where the trace form is not.
inline double relative_angle(const portalens::Quat& a, const portalens::Quat& b) {
    const double w = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    const double x = a.w * b.x - a.x * b.w - a.y * b.z + a.z * b.y;
    const double y = a.w * b.y + a.x * b.z - a.y * b.w - a.z * b.x;
    const double z = a.w * b.z - a.x * b.y + a.y * b.x - a.z * b.w;
    return 2.0 * std::atan2(std::sqrt(x * x + y * y + z * z), std::abs(w));
}

} // namespace oracle
