#include "portalens/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace portalens::kernels {

namespace {

Backend detect() {
    if (const char* env = std::getenv("PORTALENS_KERNELS"); env && std::strcmp(env, "scalar") == 0)
        return Backend::Scalar;
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& active() {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

} // namespace

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(PORTALENS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active_backend() { return active().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
    active().store(b, std::memory_order_relaxed);
}

void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out) {
#if defined(PORTALENS_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) return avx2::project_points(view, pts, out);
#endif
    scalar::project_points(view, pts, out);
}

void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline, std::span<double> out) {
#if defined(PORTALENS_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) return avx2::polyline_distance(pts, polyline, out);
#endif
    scalar::polyline_distance(pts, polyline, out);
}

} // namespace portalens::kernels
