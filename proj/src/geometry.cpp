#include "portalens/geometry.hpp"

#include "portalens/error.hpp"

#include <algorithm>
#include <limits>

namespace portalens {

Quat Quat::from_axis_angle(Vec3 axis, double radians) {
    const Vec3 a = portalens::normalized(axis);
    const double h = 0.5 * radians;
    const double s = std::sin(h);
    return Quat{std::cos(h), s * a.x, s * a.y, s * a.z}.normalized();
}

Quat Quat::normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
}

Vec3 Quat::rotate(Vec3 v) const {
    // v' = v + 2 q_v x (q_v x v + w v)
    const Vec3 qv{x, y, z};
    const Vec3 t = 2.0 * cross(qv, v);
    return v + w * t + cross(qv, t);
}

Quat operator*(const Quat& a, const Quat& b) {
    return {
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    };
}

double geodesic_angle(const Quat& a, const Quat& b) {
    const double d = std::min(1.0, std::abs(dot(a, b)));
    return 2.0 * std::acos(d);
}

Quat slerp(const Quat& q0, const Quat& q1, double u) {
    if (u <= 0.0) return q0;
    if (u >= 1.0) return q1;

    Quat b = q1;
    double d = dot(q0, q1);
    if (d < 0.0) {
        b = {-q1.w, -q1.x, -q1.y, -q1.z};
        d = -d;
    }
    double w0 = 1.0 - u;
    double w1 = u;
    if (d < 1.0 - 1e-12) {
        const double theta = std::acos(d);
        const double s = std::sin(theta);
        w0 = std::sin((1.0 - u) * theta) / s;
        w1 = std::sin(u * theta) / s;
    }
    return Quat{w0 * q0.w + w1 * b.w, w0 * q0.x + w1 * b.x, w0 * q0.y + w1 * b.y,
                w0 * q0.z + w1 * b.z}
        .normalized();
}

Quat quat_from_basis(Vec3 c0, Vec3 c1, Vec3 c2) {
    // Rotation matrix columns c0, c1, c2; R(r, c).
    const double m00 = c0.x, m10 = c0.y, m20 = c0.z;
    const double m01 = c1.x, m11 = c1.y, m21 = c1.z;
    const double m02 = c2.x, m12 = c2.y, m22 = c2.z;
    const double trace = m00 + m11 + m22;
    Quat q;
    if (trace > 0.0) {
        const double s = 2.0 * std::sqrt(trace + 1.0);
        q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
    } else if (m00 > m11 && m00 > m22) {
        const double s = 2.0 * std::sqrt(1.0 + m00 - m11 - m22);
        q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
    } else if (m11 > m22) {
        const double s = 2.0 * std::sqrt(1.0 + m11 - m00 - m22);
        q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
    } else {
        const double s = 2.0 * std::sqrt(1.0 + m22 - m00 - m11);
        q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
    }
    return q.normalized();
}

Pose compose(const Pose& a, const Pose& b) {
    return {a.orientation.rotate(b.position) + a.position,
            (a.orientation * b.orientation).normalized()};
}

Pose inverse(const Pose& p) {
    const Quat inv = p.orientation.conjugate().normalized();
    return {inv.rotate(-p.position), inv};
}

Similarity compose(const Similarity& a, const Similarity& b) {
    return {(a.rotation * b.rotation).normalized(), a.apply(b.translation),
            a.scale * b.scale};
}

Similarity inverse(const Similarity& s) {
    const Quat inv = s.rotation.conjugate().normalized();
    const double k = 1.0 / s.scale;
    return {inv, -(k * inv.rotate(s.translation)), k};
}

void CameraParams::validate() const {
    if (!(vertical_fov > 0.0 && vertical_fov < std::numbers::pi))
        throw InputError("camera vertical_fov must be in (0, pi)");
    if (!(near > 0.0 && near < far && std::isfinite(far)))
        throw InputError("camera planes must satisfy 0 < near < far");
    if (viewport_w <= 0 || viewport_h <= 0)
        throw InputError("viewport must be positive");
}

Mat4 Mat4::identity() {
    Mat4 r;
    r(0, 0) = r(1, 1) = r(2, 2) = r(3, 3) = 1.0;
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
            r(i, j) = acc;
        }
    return r;
}

Mat4 to_matrix(const Similarity& s) {
    const Vec3 c0 = s.scale * s.rotation.rotate({1, 0, 0});
    const Vec3 c1 = s.scale * s.rotation.rotate({0, 1, 0});
    const Vec3 c2 = s.scale * s.rotation.rotate({0, 0, 1});
    Mat4 r = Mat4::identity();
    r(0, 0) = c0.x, r(1, 0) = c0.y, r(2, 0) = c0.z;
    r(0, 1) = c1.x, r(1, 1) = c1.y, r(2, 1) = c1.z;
    r(0, 2) = c2.x, r(1, 2) = c2.y, r(2, 2) = c2.z;
    r(0, 3) = s.translation.x, r(1, 3) = s.translation.y, r(2, 3) = s.translation.z;
    return r;
}

Mat4 perspective(const CameraParams& cam) {
    const double f = 1.0 / std::tan(0.5 * cam.vertical_fov);
    Mat4 p;
    p(0, 0) = f / cam.aspect();
    p(1, 1) = f;
    p(2, 2) = (cam.far + cam.near) / (cam.near - cam.far);
    p(2, 3) = 2.0 * cam.far * cam.near / (cam.near - cam.far);
    p(3, 2) = -1.0;
    return p;
}

ViewTransform make_view(const Similarity& data_to_eye, const CameraParams& cam) {
    return {perspective(cam) * to_matrix(data_to_eye), data_to_eye, cam};
}

ViewTransform view_from_pose(const Pose& device, const AnchorFrame& anchor,
                             const CameraParams& cam) {
    const Similarity data_to_eye =
        compose(to_similarity(inverse(device)), anchor.to_similarity());
    return make_view(data_to_eye, cam);
}

Vec3 ViewTransform::eye_position() const { return inverse(data_to_eye).translation; }

std::optional<ScreenPoint> project_point(const ViewTransform& v, Vec3 p) {
    const auto r = detail::project_one(v.clip, 0.5 * v.width(), 0.5 * v.height(),
                                       v.data_to_eye.scale, p.x, p.y, p.z);
    if (!(r.w > 0.0)) return std::nullopt;
    return ScreenPoint{{r.sx, r.sy}, r.depth};
}

namespace {

Vec3 eye_direction(const ViewTransform& v, Vec2 screen) {
    const double t = std::tan(0.5 * v.camera.vertical_fov);
    const double nx = 2.0 * screen.x / v.width() - 1.0;
    const double ny = 1.0 - 2.0 * screen.y / v.height();
    return {nx * t * v.camera.aspect(), ny * t, -1.0};
}

} // namespace

Ray unproject_ray(const ViewTransform& v, Vec2 screen) {
    if (!(screen.x >= 0.0 && screen.x <= v.width() && screen.y >= 0.0 &&
          screen.y <= v.height()))
        throw InputError("screen point outside viewport");
    const Similarity inv = inverse(v.data_to_eye);
    return {inv.translation, normalized(inv.rotation.rotate(eye_direction(v, screen)))};
}

Vec3 point_at_depth(const ViewTransform& v, Vec2 screen, double depth) {
    const Vec3 eye = (depth * v.data_to_eye.scale) * eye_direction(v, screen);
    return inverse(v.data_to_eye).apply(eye);
}

std::optional<std::array<double, 2>> intersect_unit_cube(const Ray& ray) {
    constexpr double eps = 1e-9;
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
    const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-300) {
            if (o[i] < -eps || o[i] > 1.0 + eps) return std::nullopt;
            continue;
        }
        double a = (-eps - o[i]) / d[i];
        double b = (1.0 + eps - o[i]) / d[i];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        if (t0 > t1) return std::nullopt;
    }
    return std::array<double, 2>{t0, t1};
}

} // namespace portalens
