#pragma once

// Batch arithmetic kernels for the selection path. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. Both variants produce bit-identical results.

#include "portalens/geometry.hpp"

#include <span>
#include <string_view>

namespace portalens::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

/// Backend used by the dispatching entry points below. Defaults to the best
/// available; PORTALENS_KERNELS=scalar in the environment forces the scalar path.
Backend active_backend();

/// Overrides the active backend (tests, benchmarks). Requests for an
/// unavailable backend fall back to scalar.
void set_backend(Backend b);

/// Structure-of-arrays view over points in data units.
struct PointsSoA {
    std::span<const double> x, y, z;

    std::size_t size() const { return x.size(); }
};

/// Screen position and axial depth of each point under `view`. Entries with
/// w_out <= 0 are behind the camera and their screen/depth values are unspecified.
struct ProjectedSoA {
    std::span<double> sx, sy, depth, w;
};

void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out);

/// Euclidean distance from each point to the polyline (min over segments).
/// `polyline` needs at least one vertex; a single vertex is a point.
void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline, std::span<double> out);

namespace scalar {
void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out);
void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline, std::span<double> out);
} // namespace scalar

namespace avx2 {
void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out);
void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline, std::span<double> out);
} // namespace avx2

} // namespace portalens::kernels
