#include "portalens/kernels.hpp"

#include <limits>

namespace portalens::kernels::scalar {

void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out) {
    const double hw = 0.5 * view.width();
    const double hh = 0.5 * view.height();
    const double scale = view.data_to_eye.scale;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto r = detail::project_one(view.clip, hw, hh, scale, pts.x[i], pts.y[i], pts.z[i]);
        out.sx[i] = r.sx;
        out.sy[i] = r.sy;
        out.depth[i] = r.depth;
        out.w[i] = r.w;
    }
}

void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline, std::span<double> out) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double px = pts.x[i], py = pts.y[i], pz = pts.z[i];
        double best = std::numeric_limits<double>::infinity();
        if (polyline.size() == 1) {
            const double ex = px - polyline[0].x, ey = py - polyline[0].y, ez = pz - polyline[0].z;
            best = (ex * ex + ey * ey) + ez * ez;
        }
        for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
            const Vec3 a = polyline[s];
            const double dx = polyline[s + 1].x - a.x;
            const double dy = polyline[s + 1].y - a.y;
            const double dz = polyline[s + 1].z - a.z;
            const double len2 = (dx * dx + dy * dy) + dz * dz;
            const double ax = px - a.x, ay = py - a.y, az = pz - a.z;
            double t = 0.0;
            if (len2 > 0.0) {
                t = ((ax * dx + ay * dy) + az * dz) / len2;
                t = t < 0.0 ? 0.0 : t;
                t = t > 1.0 ? 1.0 : t;
            }
            const double ex = ax - t * dx;
            const double ey = ay - t * dy;
            const double ez = az - t * dz;
            const double d2 = (ex * ex + ey * ey) + ez * ez;
            best = d2 < best ? d2 : best;
        }
        out[i] = std::sqrt(best);
    }
}

} // namespace portalens::kernels::scalar
