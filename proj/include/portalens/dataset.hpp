#pragma once

#include "portalens/geometry.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace portalens {

/// One raw observation: planar position plus time.
struct Sample {
    double x = 0.0, y = 0.0, t = 0.0;
};

struct Trajectory {
    std::string id;
    std::vector<Sample> samples;
};

struct Extent {
    double min = 0.0, max = 1.0;

    double normalize(double v) const {
        const double range = max - min;
        return range > 0.0 ? (v - min) / range : 0.0;
    }
};

/// Raw data axes. In the cube, X = x, Y (up) = t, Z = y.
enum class Axis { X, Y, T };

struct Aabb {
    Vec3 lo, hi;

    bool overlaps(const Aabb& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y &&
               lo.z <= o.hi.z && o.lo.z <= hi.z;
    }
};

/// A segment is the pair of samples (segment, segment + 1) of a trajectory.
struct SegmentRef {
    std::uint32_t trajectory = 0;
    std::uint32_t segment = 0;

    friend auto operator<=>(const SegmentRef&, const SegmentRef&) = default;
};

/// Space-time cube dataset. Immutable after construction; every query is const
/// and safe to call concurrently.
class Dataset {
public:
    Dataset() : Dataset(std::vector<Trajectory>{}) {}
    explicit Dataset(std::vector<Trajectory> trajectories, int grid_cells = 32);

    std::size_t trajectory_count() const { return trajectories_.size(); }
    const Trajectory& trajectory(std::size_t i) const { return trajectories_[i]; }
    std::span<const Trajectory> trajectories() const { return trajectories_; }

    std::size_t sample_count() const { return xs_.size(); }
    std::size_t segment_count() const;

    /// Global sample index range [first, last) of trajectory i.
    std::size_t first_sample(std::size_t i) const { return offsets_[i]; }
    std::size_t end_sample(std::size_t i) const { return offsets_[i + 1]; }

    /// Normalized cube coordinates of all samples, trajectory-major.
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    std::span<const double> zs() const { return zs_; }

    Vec3 position(std::size_t global_sample) const {
        return {xs_[global_sample], ys_[global_sample], zs_[global_sample]};
    }
    Vec3 position(std::size_t traj, std::size_t sample) const {
        return position(offsets_[traj] + sample);
    }
    /// Normalized time (the cube's vertical coordinate).
    double time(std::size_t global_sample) const { return ys_[global_sample]; }

    const Extent& extent(Axis a) const { return extents_[static_cast<int>(a)]; }
    int grid_cells() const { return cells_; }

    /// Index of trajectory with this id, or -1.
    std::ptrdiff_t find(const std::string& id) const;

    /// Superset of the segments whose bounding box overlaps `box`
    /// (normalized units). Sorted and free of duplicates.
    std::vector<SegmentRef> query_candidates(const Aabb& box) const;

    Aabb segment_bounds(SegmentRef s) const;

private:
    std::size_t cell_index(int i, int j, int k) const {
        return (std::size_t(i) * cells_ + std::size_t(j)) * cells_ + std::size_t(k);
    }
    int cell_coord(double v) const;

    std::vector<Trajectory> trajectories_;
    std::vector<std::size_t> offsets_;
    std::vector<double> xs_, ys_, zs_;
    Extent extents_[3];
    int cells_;
    std::vector<std::vector<SegmentRef>> grid_;
};

struct LoadReport {
    std::vector<std::string> warnings;
};

/// Parses `traj_id,x,y,t` CSV. Throws ParseError/InputError on malformed
/// input; trajectories with fewer than two samples are dropped with a warning.
Dataset load_trajectories(std::istream& in, LoadReport* report = nullptr, int grid_cells = 32);
Dataset load_trajectories_file(const std::string& path, LoadReport* report = nullptr,
                               int grid_cells = 32);

/// Time filter shared by the session and the dataset views: a sample with
/// normalized time t is visible iff t <= 1 - filter_value.
inline bool time_visible(double normalized_t, double filter_value) {
    return normalized_t <= 1.0 - filter_value;
}

/// Visibility of every global sample under the filter.
std::vector<bool> apply_filter(const Dataset& ds, double filter_value);

struct HeatmapGrid {
    Axis axis = Axis::T;
    int nu = 1, nv = 1;
    std::vector<std::uint64_t> counts; ///< row-major, counts[v * nu + u]

    std::uint64_t at(int u, int v) const { return counts[std::size_t(v) * nu + std::size_t(u)]; }
};

/// Projects every sample onto the cube face orthogonal to `axis`: T bins by
/// (x, y), X by (y, t), Y by (x, t).
HeatmapGrid project_heatmap(const Dataset& ds, Axis axis, int nu, int nv);

Axis parse_axis(const std::string& name);

} // namespace portalens
