#pragma once

#include "portalens/dataset.hpp"
#include "portalens/geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace portalens {

struct NavConfig {
    double pick_radius_px = 20.0;
    double hover_offset = 0.02; ///< data units above the path
    double gain = 1.0;          ///< data units of arc length per metre of device motion
};

/// Navigation locked onto one polyline: device motion maps to signed travel
/// along it.
struct PathLock {
    std::string trajectory_id;
    double arc_length = 0.0;
    double gain = 1.0;
    std::shared_ptr<const std::vector<Vec3>> path;
    std::shared_ptr<const std::vector<double>> cumulative; ///< cumulative[i] = length up to vertex i

    double total_length() const { return cumulative->back(); }
};

/// Builds a lock over an explicit polyline (at least 2 vertices).
PathLock make_path_lock(std::string trajectory_id, std::vector<Vec3> path, double arc_length,
                        double gain = 1.0);

/// Locks onto the vertex of trajectory `traj` whose projection is nearest the tap.
/// Throws InputError("no route under finger") when none lies within the pick radius.
PathLock lock_on(const Dataset& ds, std::size_t traj, Vec2 tap, const ViewTransform& view,
                 const NavConfig& cfg = {});

/// Advances the lock by the component of the device displacement (metres,
/// physical space) along the local path tangent, measured in the anchor frame.
PathLock step(const PathLock& lock, Vec3 displacement, const Quat& anchor_orientation);

Vec3 path_point(const PathLock& lock, double s);
/// Unit tangent of the segment containing s; at a vertex, the earlier segment.
/// Zero-length segments are skipped.
Vec3 path_tangent(const PathLock& lock, double s);

/// Camera pose in data units: hovering above the path point, looking along the tangent.
Pose locked_camera(const PathLock& lock, double hover_offset);

/// Physical device pose that reproduces the locked camera under `anchor`.
Pose locked_device_pose(const PathLock& lock, const AnchorFrame& anchor, double hover_offset);

ViewTransform locked_view(const PathLock& lock, const AnchorFrame& anchor,
                          const CameraParams& cam, double hover_offset = 0.02);

} // namespace portalens
