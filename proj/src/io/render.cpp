#include "portalens/io/render.hpp"

#include "portalens/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace portalens {

Rgb palette::pin(PinColor c) {
    switch (c) {
    case PinColor::Red: return {230, 40, 40};
    case PinColor::Orange: return {245, 140, 30};
    case PinColor::Yellow: return {240, 230, 50};
    case PinColor::Green: return {60, 200, 80};
    case PinColor::Blue: return {60, 110, 245};
    case PinColor::Purple: return {170, 70, 220};
    }
    return {255, 255, 255};
}

Image::Image(int width, int height, Rgb fill) : w_(width), h_(height) {
    if (width <= 0 || height <= 0) throw InputError("image size must be positive");
    rgb_.resize(std::size_t(width) * std::size_t(height) * 3);
    for (std::size_t i = 0; i < rgb_.size(); i += 3) {
        rgb_[i] = fill.r;
        rgb_[i + 1] = fill.g;
        rgb_[i + 2] = fill.b;
    }
}

Rgb Image::at(int x, int y) const {
    const std::size_t i = (std::size_t(y) * std::size_t(w_) + std::size_t(x)) * 3;
    return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const std::size_t i = (std::size_t(y) * std::size_t(w_) + std::size_t(x)) * 3;
    rgb_[i] = c.r;
    rgb_[i + 1] = c.g;
    rgb_[i + 2] = c.b;
}

void Image::line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        set(x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Image::fill_square(int cx, int cy, int half, Rgb c) {
    for (int y = cy - half; y <= cy + half; ++y)
        for (int x = cx - half; x <= cx + half; ++x) set(x, y, c);
}

void write_ppm(std::ostream& out, const Image& img) {
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.bytes().data()), std::streamsize(img.bytes().size()));
}

std::string to_ppm(const Image& img) {
    std::ostringstream os;
    write_ppm(os, img);
    return os.str();
}

int round_pixel(double v) { return int(std::floor(v + 0.5)); }

namespace {

// Liang-Barsky against a guard band three viewports wide, so that Bresenham
// never walks millions of offscreen pixels. Only runs when an endpoint is out.
bool clip_2d(Vec2& a, Vec2& b, double lo_x, double lo_y, double hi_x, double hi_y) {
    auto inside = [&](Vec2 p) { return p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y; };
    if (inside(a) && inside(b)) return true;
    const double dx = b.x - a.x, dy = b.y - a.y;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - lo_x, hi_x - a.x, a.y - lo_y, hi_y - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) t0 = std::max(t0, r);
        else t1 = std::min(t1, r);
        if (t0 > t1) return false;
    }
    const Vec2 a0 = a;
    if (t1 < 1.0) b = {a0.x + t1 * dx, a0.y + t1 * dy};
    if (t0 > 0.0) a = {a0.x + t0 * dx, a0.y + t0 * dy};
    return true;
}

class Painter {
public:
    Painter(Image& img, const ViewTransform& v) : img_(img), v_(v) {}

    void screen_segment(Vec2 a, Vec2 b, Rgb c) {
        const double w = img_.width(), h = img_.height();
        if (!clip_2d(a, b, -w, -h, 2.0 * w, 2.0 * h)) return;
        img_.line(round_pixel(a.x), round_pixel(a.y), round_pixel(b.x), round_pixel(b.y), c);
    }

    // Data-space segment: clipped at w = near in clip space before projection.
    void segment(Vec3 a, Vec3 b, Rgb c) {
        const double near = v_.camera.near;
        const double wa = clip_w(a), wb = clip_w(b);
        if (wa < near && wb < near) return;
        if (wa < near) a = a + ((near - wa) / (wb - wa)) * (b - a);
        else if (wb < near) b = b + ((near - wb) / (wa - wb)) * (a - b);
        const auto pa = project_point(v_, a), pb = project_point(v_, b);
        if (!pa || !pb) return;
        screen_segment(pa->screen, pb->screen, c);
    }

    void polyline(const std::vector<Vec3>& pts, Rgb c) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) segment(pts[i], pts[i + 1], c);
    }

    void marker(Vec3 p, int half, Rgb c) {
        if (clip_w(p) < v_.camera.near) return;
        const auto sp = project_point(v_, p);
        if (!sp) return;
        img_.fill_square(round_pixel(sp->screen.x), round_pixel(sp->screen.y), half, c);
    }

private:
    double clip_w(Vec3 p) const {
        const auto& m = v_.clip.m;
        return ((m[12] * p.x + m[13] * p.y) + m[14] * p.z) + m[15];
    }

    Image& img_;
    const ViewTransform& v_;
};

} // namespace

Image render_frame(const Dataset& ds, const ViewTransform& view, const RenderOverlays& o) {
    Image img(view.width(), view.height());
    Painter p(img, view);

    if (o.draw_cube) {
        for (int a = 0; a < 8; ++a)
            for (int bit = 1; bit < 8; bit <<= 1) {
                const int b = a | bit;
                if (b == a) continue;
                p.segment({double(a & 1), double((a >> 1) & 1), double((a >> 2) & 1)},
                          {double(b & 1), double((b >> 1) & 1), double((b >> 2) & 1)}, palette::cube);
            }
    }

    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
        const bool sel = t < o.selected.size() && o.selected[t];
        const Rgb c = sel ? palette::selected : palette::trajectory;
        for (std::size_t g = ds.first_sample(t); g + 1 < ds.end_sample(t); ++g) {
            if (!time_visible(ds.time(g), o.filter_value) || !time_visible(ds.time(g + 1), o.filter_value))
                continue;
            p.segment(ds.position(g), ds.position(g + 1), c);
        }
    }

    for (std::size_t i = 0; i + 1 < o.lasso.size(); ++i)
        p.screen_segment(o.lasso[i], o.lasso[i + 1], palette::lasso);
    p.polyline(o.tube, palette::tube);
    for (const auto& s : o.world_strokes) p.polyline(s, palette::stroke);
    for (const auto& s : o.screen_strokes)
        for (std::size_t i = 0; i + 1 < s.size(); ++i) p.screen_segment(s[i], s[i + 1], palette::stroke);
    for (const auto& pin : o.pins) p.marker(pin.position, 2, palette::pin(pin.color));
    return img;
}

std::size_t tour_frame_count(const Tour& tour, double fps) {
    // The epsilon absorbs representation error in products like 2.0 * 10.0 / 3 * 3.
    return std::size_t(std::floor(tour.total_duration() * fps + 1e-9)) + 1;
}

std::size_t render_tour(const Tour& tour, double fps, const Dataset& ds, const CameraParams& cam,
                        const std::string& out_dir) {
    if (!(fps >= 1.0)) throw InputError("fps must be >= 1");
    validate(tour);
    std::filesystem::create_directories(out_dir);
    const std::size_t n = tour_frame_count(tour, fps);
    for (std::size_t k = 0; k < n; ++k) {
        const ViewSnapshot s = sample_tour(tour, double(k) / fps);
        RenderOverlays o;
        o.filter_value = s.filter_value;
        const Image img = render_frame(ds, snapshot_view(s, cam), o);
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu.ppm", k);
        std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
        if (!out) throw InputError("cannot write " + out_dir + "/" + name);
        write_ppm(out, img);
    }
    return n;
}

Image render_heatmap(const HeatmapGrid& grid, int cell_px) {
    if (cell_px < 1) throw InputError("cell size must be >= 1");
    Image img(grid.nu * cell_px, grid.nv * cell_px, Rgb{0, 0, 0});
    const std::uint64_t peak = grid.counts.empty() ? 0 : *std::max_element(grid.counts.begin(), grid.counts.end());
    for (int v = 0; v < grid.nv; ++v)
        for (int u = 0; u < grid.nu; ++u) {
            const auto level = std::uint8_t(peak ? grid.at(u, v) * 255 / peak : 0);
            // v grows upward, image rows grow downward.
            const int y0 = (grid.nv - 1 - v) * cell_px;
            for (int y = 0; y < cell_px; ++y)
                for (int x = 0; x < cell_px; ++x) img.set(u * cell_px + x, y0 + y, {level, level, level});
        }
    return img;
}

} // namespace portalens
