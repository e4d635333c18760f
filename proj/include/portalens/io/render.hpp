#pragma once

#include "portalens/annotate.hpp"
#include "portalens/dataset.hpp"
#include "portalens/tour.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace portalens {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

namespace palette {
inline constexpr Rgb background{12, 14, 20};
inline constexpr Rgb cube{70, 70, 80};
inline constexpr Rgb trajectory{90, 160, 220};
inline constexpr Rgb selected{255, 200, 40};
inline constexpr Rgb lasso{255, 80, 80};
inline constexpr Rgb stroke{255, 255, 255};
inline constexpr Rgb tube{200, 100, 255};
Rgb pin(PinColor c);
} // namespace palette

/// 8-bit RGB raster, row-major from the top-left.
class Image {
public:
    Image(int width, int height, Rgb fill = palette::background);

    int width() const { return w_; }
    int height() const { return h_; }
    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c); ///< ignores out-of-bounds pixels
    /// Bresenham line between integer endpoints, clipped to the image.
    void line(int x0, int y0, int x1, int y1, Rgb c);
    void fill_square(int cx, int cy, int half, Rgb c);

    const std::vector<std::uint8_t>& bytes() const { return rgb_; }

private:
    int w_, h_;
    std::vector<std::uint8_t> rgb_;
};

void write_ppm(std::ostream& out, const Image& img);
std::string to_ppm(const Image& img);

/// Everything drawn on top of the trajectories.
struct RenderOverlays {
    double filter_value = 0.0;
    std::vector<bool> selected;                  ///< per trajectory; empty = none
    std::vector<Pin> pins;
    std::vector<std::vector<Vec2>> screen_strokes; ///< pixels
    std::vector<std::vector<Vec3>> world_strokes;  ///< data units
    std::vector<Vec2> lasso;                     ///< in-progress polygon, pixels
    std::vector<Vec3> tube;                      ///< active tube polyline
    bool draw_cube = true;
};

/// Rounds a pixel coordinate to the nearest integer, halves up: floor(x + 0.5).
int round_pixel(double v);

/// Software rendering of the portal view. Painter's order: cube, trajectories
/// in dataset order, then overlays; no depth buffer.
Image render_frame(const Dataset& ds, const ViewTransform& view, const RenderOverlays& overlays);

/// Number of frames render_tour produces: floor(total * fps) + 1.
std::size_t tour_frame_count(const Tour& tour, double fps);

/// Renders frame k at t = k / fps into out_dir/frame_00000.ppm, ... Returns the count.
std::size_t render_tour(const Tour& tour, double fps, const Dataset& ds, const CameraParams& cam,
                        const std::string& out_dir);

/// One pixel block per heatmap cell, grey level proportional to count / max.
Image render_heatmap(const HeatmapGrid& grid, int cell_px = 1);

} // namespace portalens
