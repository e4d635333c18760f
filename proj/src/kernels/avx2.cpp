#include "portalens/kernels.hpp"

#include <immintrin.h>

#include <limits>

// Operation order mirrors kernels/scalar.cpp exactly; with -ffp-contract=off
// and no FMA the two paths round identically. The functions carry a target
// attribute instead of building the file with -mavx2 so that inline helpers
// instantiated here stay baseline x86-64.

#define PORTALENS_AVX2_FN __attribute__((target("avx2")))

namespace portalens::kernels::avx2 {

PORTALENS_AVX2_FN void project_points(const ViewTransform& view, PointsSoA pts, ProjectedSoA out) {
    const auto& c = view.clip.m;
    const __m256d m0 = _mm256_set1_pd(c[0]), m1 = _mm256_set1_pd(c[1]);
    const __m256d m2 = _mm256_set1_pd(c[2]), m3 = _mm256_set1_pd(c[3]);
    const __m256d m4 = _mm256_set1_pd(c[4]), m5 = _mm256_set1_pd(c[5]);
    const __m256d m6 = _mm256_set1_pd(c[6]), m7 = _mm256_set1_pd(c[7]);
    const __m256d m12 = _mm256_set1_pd(c[12]), m13 = _mm256_set1_pd(c[13]);
    const __m256d m14 = _mm256_set1_pd(c[14]), m15 = _mm256_set1_pd(c[15]);
    const __m256d hw = _mm256_set1_pd(0.5 * view.width());
    const __m256d hh = _mm256_set1_pd(0.5 * view.height());
    const __m256d scale = _mm256_set1_pd(view.data_to_eye.scale);
    const __m256d one = _mm256_set1_pd(1.0);

    const std::size_t n = pts.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(&pts.x[i]);
        const __m256d y = _mm256_loadu_pd(&pts.y[i]);
        const __m256d z = _mm256_loadu_pd(&pts.z[i]);
        const __m256d cx = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(m0, x), _mm256_mul_pd(m1, y)),
                          _mm256_mul_pd(m2, z)),
            m3);
        const __m256d cy = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(m4, x), _mm256_mul_pd(m5, y)),
                          _mm256_mul_pd(m6, z)),
            m7);
        const __m256d cw = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(m12, x), _mm256_mul_pd(m13, y)),
                          _mm256_mul_pd(m14, z)),
            m15);
        const __m256d nx = _mm256_div_pd(cx, cw);
        const __m256d ny = _mm256_div_pd(cy, cw);
        _mm256_storeu_pd(&out.sx[i], _mm256_mul_pd(_mm256_add_pd(nx, one), hw));
        _mm256_storeu_pd(&out.sy[i], _mm256_mul_pd(_mm256_sub_pd(one, ny), hh));
        _mm256_storeu_pd(&out.depth[i], _mm256_div_pd(cw, scale));
        _mm256_storeu_pd(&out.w[i], cw);
    }
    if (i < n) {
        const auto tail = [i](std::span<double> s) { return s.subspan(i); };
        const auto ctail = [i](std::span<const double> s) { return s.subspan(i); };
        scalar::project_points(view, {ctail(pts.x), ctail(pts.y), ctail(pts.z)},
                               {tail(out.sx), tail(out.sy), tail(out.depth), tail(out.w)});
    }
}

PORTALENS_AVX2_FN void polyline_distance(PointsSoA pts, std::span<const Vec3> polyline,
                                         std::span<double> out) {
    const std::size_t n = pts.size();
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d px = _mm256_loadu_pd(&pts.x[i]);
        const __m256d py = _mm256_loadu_pd(&pts.y[i]);
        const __m256d pz = _mm256_loadu_pd(&pts.z[i]);
        __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        if (polyline.size() == 1) {
            const __m256d ex = _mm256_sub_pd(px, _mm256_set1_pd(polyline[0].x));
            const __m256d ey = _mm256_sub_pd(py, _mm256_set1_pd(polyline[0].y));
            const __m256d ez = _mm256_sub_pd(pz, _mm256_set1_pd(polyline[0].z));
            best = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)),
                                 _mm256_mul_pd(ez, ez));
        }
        for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
            const Vec3 a = polyline[s];
            const double dxs = polyline[s + 1].x - a.x;
            const double dys = polyline[s + 1].y - a.y;
            const double dzs = polyline[s + 1].z - a.z;
            const double len2 = (dxs * dxs + dys * dys) + dzs * dzs;
            const __m256d dx = _mm256_set1_pd(dxs);
            const __m256d dy = _mm256_set1_pd(dys);
            const __m256d dz = _mm256_set1_pd(dzs);
            const __m256d ax = _mm256_sub_pd(px, _mm256_set1_pd(a.x));
            const __m256d ay = _mm256_sub_pd(py, _mm256_set1_pd(a.y));
            const __m256d az = _mm256_sub_pd(pz, _mm256_set1_pd(a.z));
            __m256d t = zero;
            if (len2 > 0.0) {
                const __m256d num = _mm256_add_pd(
                    _mm256_add_pd(_mm256_mul_pd(ax, dx), _mm256_mul_pd(ay, dy)),
                    _mm256_mul_pd(az, dz));
                t = _mm256_div_pd(num, _mm256_set1_pd(len2));
                t = _mm256_max_pd(t, zero);
                t = _mm256_min_pd(t, one);
            }
            const __m256d ex = _mm256_sub_pd(ax, _mm256_mul_pd(t, dx));
            const __m256d ey = _mm256_sub_pd(ay, _mm256_mul_pd(t, dy));
            const __m256d ez = _mm256_sub_pd(az, _mm256_mul_pd(t, dz));
            const __m256d d2 = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)),
                _mm256_mul_pd(ez, ez));
            best = _mm256_min_pd(d2, best);
        }
        _mm256_storeu_pd(&out[i], _mm256_sqrt_pd(best));
    }
    if (i < n) {
        scalar::polyline_distance({pts.x.subspan(i), pts.y.subspan(i), pts.z.subspan(i)},
                                  polyline, out.subspan(i));
    }
}

} // namespace portalens::kernels::avx2
