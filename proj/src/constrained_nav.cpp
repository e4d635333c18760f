#include "portalens/constrained_nav.hpp"

#include "portalens/error.hpp"

#include <algorithm>

namespace portalens {

PathLock make_path_lock(std::string trajectory_id, std::vector<Vec3> path, double arc_length,
                        double gain) {
    if (path.size() < 2) throw InputError("path lock needs at least 2 vertices");
    if (!(gain > 0.0)) throw InputError("path lock gain must be positive");
    std::vector<double> cum(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + norm(path[i] - path[i - 1]);
    PathLock lock;
    lock.trajectory_id = std::move(trajectory_id);
    lock.gain = gain;
    lock.arc_length = std::clamp(arc_length, 0.0, cum.back());
    lock.path = std::make_shared<const std::vector<Vec3>>(std::move(path));
    lock.cumulative = std::make_shared<const std::vector<double>>(std::move(cum));
    return lock;
}

PathLock lock_on(const Dataset& ds, std::size_t traj, Vec2 tap, const ViewTransform& view,
                 const NavConfig& cfg) {
    if (traj >= ds.trajectory_count()) throw InputError("unknown trajectory");
    if (!(tap.x >= 0.0 && tap.x <= view.width() && tap.y >= 0.0 && tap.y <= view.height()))
        throw InputError("tap outside viewport");

    const std::size_t n = ds.trajectory(traj).samples.size();
    std::vector<Vec3> path(n);
    std::size_t best = n;
    double best_dist = cfg.pick_radius_px;
    for (std::size_t i = 0; i < n; ++i) {
        path[i] = ds.position(traj, i);
        const auto p = project_point(view, path[i]);
        if (!p) continue;
        const double d = norm(p->screen - tap);
        if (d < best_dist || (d == best_dist && best == n)) {
            best_dist = d;
            best = i;
        }
    }
    if (best == n) throw InputError("no route under finger");

    PathLock lock = make_path_lock(ds.trajectory(traj).id, std::move(path), 0.0, cfg.gain);
    lock.arc_length = (*lock.cumulative)[best];
    return lock;
}

namespace {

// Segment containing s (earlier one at vertices), skipping zero-length
// segments. Returns path.size() - 1 when the path has no extent.
std::size_t containing_segment(const PathLock& lock, double s) {
    const auto& cum = *lock.cumulative;
    const std::size_t nseg = cum.size() - 1;
    std::size_t k = std::size_t(std::lower_bound(cum.begin() + 1, cum.end(), s) - cum.begin()) - 1;
    k = std::min(k, nseg - 1);
    while (k < nseg && !(cum[k + 1] > cum[k])) ++k;
    if (k == nseg) {
        // s sits past trailing zero-length segments; fall back to the last non-degenerate one
        for (std::size_t j = nseg; j-- > 0;)
            if (cum[j + 1] > cum[j]) return j;
    }
    return k;
}

} // namespace

Vec3 path_point(const PathLock& lock, double s) {
    const auto& path = *lock.path;
    const auto& cum = *lock.cumulative;
    const std::size_t k = containing_segment(lock, s);
    if (k >= path.size() - 1) return path.front();
    const double u = (s - cum[k]) / (cum[k + 1] - cum[k]);
    return path[k] + u * (path[k + 1] - path[k]);
}

Vec3 path_tangent(const PathLock& lock, double s) {
    const auto& path = *lock.path;
    const std::size_t k = containing_segment(lock, s);
    if (k >= path.size() - 1) return {1.0, 0.0, 0.0};
    return normalized(path[k + 1] - path[k]);
}

PathLock step(const PathLock& lock, Vec3 displacement, const Quat& anchor_orientation) {
    const Vec3 local = anchor_orientation.conjugate().rotate(displacement);
    const double ds = lock.gain * dot(local, path_tangent(lock, lock.arc_length));
    PathLock out = lock;
    out.arc_length = std::clamp(lock.arc_length + ds, 0.0, lock.total_length());
    return out;
}

Pose locked_camera(const PathLock& lock, double hover_offset) {
    const Vec3 forward = path_tangent(lock, lock.arc_length);
    Vec3 up{0.0, 1.0, 0.0};
    if (norm(cross(forward, up)) < 1e-9) up = {0.0, 0.0, -1.0};
    const Vec3 right = normalized(cross(forward, up));
    const Vec3 cam_up = cross(right, forward);
    const Vec3 position = path_point(lock, lock.arc_length) + Vec3{0.0, hover_offset, 0.0};
    return {position, quat_from_basis(right, cam_up, -forward)};
}

Pose locked_device_pose(const PathLock& lock, const AnchorFrame& anchor, double hover_offset) {
    const Pose cam = locked_camera(lock, hover_offset);
    return compose(anchor.pose, Pose{anchor.scale * cam.position, cam.orientation});
}

ViewTransform locked_view(const PathLock& lock, const AnchorFrame& anchor,
                          const CameraParams& cam, double hover_offset) {
    return view_from_pose(locked_device_pose(lock, anchor, hover_offset), anchor, cam);
}

} // namespace portalens
