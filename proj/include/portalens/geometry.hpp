#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace portalens {

// ── Vectors ─────────────────────────────────────────────────────

struct Vec2 {
    double x = 0.0, y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }
inline bool is_finite(Vec3 a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// ── Rotations ───────────────────────────────────────────────────

/// Unit quaternion, Hamilton convention, w first.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quat identity() { return {}; }
    static Quat from_axis_angle(Vec3 axis, double radians);

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const;
    Quat conjugate() const { return {w, -x, -y, -z}; }
    Vec3 rotate(Vec3 v) const;

    friend bool operator==(const Quat&, const Quat&) = default;
};

Quat operator*(const Quat& a, const Quat& b);
inline double dot(const Quat& a, const Quat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Rotation angle between two orientations, in [0, pi].
double geodesic_angle(const Quat& a, const Quat& b);

/// Shortest-arc spherical interpolation; u is clamped to [0, 1].
Quat slerp(const Quat& q0, const Quat& q1, double u);

/// Rotation whose columns are the given orthonormal right-handed basis.
Quat quat_from_basis(Vec3 x_axis, Vec3 y_axis, Vec3 z_axis);

// ── Rigid and similarity transforms ─────────────────────────────

struct Pose {
    Vec3 position;
    Quat orientation;

    static Pose identity() { return {}; }
    static Pose translation(Vec3 t) { return {t, Quat::identity()}; }

    Vec3 apply(Vec3 p) const { return orientation.rotate(p) + position; }

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// compose(a, b) applies b first, then a.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

/// p -> scale * R p + t
struct Similarity {
    Quat rotation;
    Vec3 translation;
    double scale = 1.0;

    Vec3 apply(Vec3 p) const { return rotation.rotate(scale * p) + translation; }
};

Similarity compose(const Similarity& a, const Similarity& b);
Similarity inverse(const Similarity& s);
inline Similarity to_similarity(const Pose& p) { return {p.orientation, p.position, 1.0}; }

/// Where the virtual data cube is pinned in physical space.
struct AnchorFrame {
    Pose pose;
    double scale = 0.5; ///< metres per data unit

    Similarity to_similarity() const { return {pose.orientation, pose.position, scale}; }
    static AnchorFrame from_similarity(const Similarity& s) {
        return {{s.translation, s.rotation}, s.scale};
    }

    friend bool operator==(const AnchorFrame&, const AnchorFrame&) = default;
};

struct CameraParams {
    double vertical_fov = std::numbers::pi / 3.0;
    double near = 0.01;
    double far = 100.0;
    int viewport_w = 800;
    int viewport_h = 600;

    double aspect() const { return double(viewport_w) / double(viewport_h); }
    /// Throws InputError when any field is out of range.
    void validate() const;
};

// ── Matrices and projection ─────────────────────────────────────

/// Row-major 4x4 matrix.
struct Mat4 {
    std::array<double, 16> m{};

    static Mat4 identity();
    double& operator()(int r, int c) { return m[std::size_t(r * 4 + c)]; }
    double operator()(int r, int c) const { return m[std::size_t(r * 4 + c)]; }

    friend bool operator==(const Mat4&, const Mat4&) = default;
};

Mat4 operator*(const Mat4& a, const Mat4& b);
Mat4 to_matrix(const Similarity& s);
/// OpenGL-style perspective for a camera looking down -Z.
Mat4 perspective(const CameraParams& cam);

/// Maps data-unit points to clip space. `data_to_eye` is the rigid+scale part
/// (eye space is in metres), `clip` = perspective * data_to_eye.
struct ViewTransform {
    Mat4 clip;
    Similarity data_to_eye;
    CameraParams camera;

    int width() const { return camera.viewport_w; }
    int height() const { return camera.viewport_h; }
    Vec3 eye_position() const; ///< camera centre in data units
};

ViewTransform make_view(const Similarity& data_to_eye, const CameraParams& cam);

/// Device looks down its local -Z with +Y up.
ViewTransform view_from_pose(const Pose& device, const AnchorFrame& anchor,
                             const CameraParams& cam);

struct ScreenPoint {
    Vec2 screen;  ///< pixels, origin top-left
    double depth; ///< axial distance from the eye in data units
};

/// std::nullopt when the point is behind the camera (clip w <= 0).
std::optional<ScreenPoint> project_point(const ViewTransform& v, Vec3 p);

struct Ray {
    Vec3 origin;    ///< eye position, data units
    Vec3 direction; ///< unit length
};

/// Throws InputError when `screen` lies outside [0, w] x [0, h].
Ray unproject_ray(const ViewTransform& v, Vec2 screen);

/// Point under `screen` at the given axial depth (data units). No viewport check.
Vec3 point_at_depth(const ViewTransform& v, Vec2 screen, double depth);

/// Entry/exit parameters of a ray against the unit data cube, if it hits.
std::optional<std::array<double, 2>> intersect_unit_cube(const Ray& ray);

namespace detail {

// Shared by project_point and the scalar kernel so both agree bit-for-bit.
// The AVX2 kernel mirrors this operation order exactly.
struct Projected {
    double sx, sy, depth, w;
};

inline Projected project_one(const Mat4& c, double half_w, double half_h,
                             double scale, double x, double y, double z) {
    const double cx = ((c.m[0] * x + c.m[1] * y) + c.m[2] * z) + c.m[3];
    const double cy = ((c.m[4] * x + c.m[5] * y) + c.m[6] * z) + c.m[7];
    const double cw = ((c.m[12] * x + c.m[13] * y) + c.m[14] * z) + c.m[15];
    const double nx = cx / cw;
    const double ny = cy / cw;
    return {(nx + 1.0) * half_w, (1.0 - ny) * half_h, cw / scale, cw};
}

} // namespace detail

} // namespace portalens
