#pragma once

#include "portalens/dataset.hpp"
#include "portalens/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace portalens {

/// Screen polygon swept from a frozen camera: the view cone of a lasso.
struct LassoVolume {
    std::vector<Vec2> polygon; ///< pixels; closing edge implied
    ViewTransform view;
    double depth_near = 0.0; ///< axial depth range, data units
    double depth_far = 0.0;
};

/// Lasso with the camera's full depth range. Throws InputError for fewer than
/// 3 distinct vertices.
LassoVolume make_lasso(std::vector<Vec2> polygon, const ViewTransform& view);
void validate(const LassoVolume& v);

/// Even-odd point-in-polygon; points exactly on an edge count as inside.
bool polygon_contains(const std::vector<Vec2>& polygon, Vec2 p);

bool lasso_contains(const LassoVolume& volume, Vec3 p);

/// Pen-drawn polyline with a selection radius (data units).
struct TubeSelector {
    std::vector<Vec3> control_points;
    double radius = 0.05;

    friend bool operator==(const TubeSelector&, const TubeSelector&) = default;
};

void validate(const TubeSelector& t);
TubeSelector edit_tube_point(const TubeSelector& t, std::size_t index, Vec3 position);
TubeSelector edit_tube_radius(const TubeSelector& t, double radius);

struct SampleRange {
    std::uint32_t first = 0, last = 0; ///< inclusive

    friend bool operator==(const SampleRange&, const SampleRange&) = default;
};

struct SelectionEntry {
    std::string id;
    std::vector<SampleRange> ranges;

    friend bool operator==(const SelectionEntry&, const SelectionEntry&) = default;
};

/// Entries sorted by trajectory id; ranges sorted and disjoint.
struct SelectionResult {
    std::vector<SelectionEntry> entries;

    std::vector<std::string> ids() const;
    bool empty() const { return entries.empty(); }

    friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

enum class IntersectMode {
    PerSample,     ///< one sample must lie in every volume
    PerTrajectory, ///< each volume must contain some sample of the trajectory
};

struct SelectOptions {
    double filter_value = 0.0; ///< only time-visible points qualify
    int subdivisions = 64;     ///< lasso_select tests segment points at step 1/subdivisions
    IntersectMode intersect_mode = IntersectMode::PerSample;
    bool use_index = true;
};

SelectionResult lasso_select(const Dataset& ds, const LassoVolume& volume,
                             const SelectOptions& opt = {});
/// Throws InputError for an empty volume list.
SelectionResult intersect_select(const Dataset& ds, const std::vector<LassoVolume>& volumes,
                                 const SelectOptions& opt = {});
SelectionResult tube_select(const Dataset& ds, const TubeSelector& tube,
                            const SelectOptions& opt = {});

/// Builds a result from per-trajectory matched-sample flags.
SelectionResult make_selection(const Dataset& ds, const std::vector<std::vector<bool>>& matched);

/// `traj_id<TAB>first_idx<TAB>last_idx` lines, sorted by id then first_idx.
void write_selection(std::ostream& out, const SelectionResult& r);

/// Conservative data-space bounds of a lasso volume, clipped to the unit cube.
/// std::nullopt when the volume cannot reach the cube.
std::optional<Aabb> lasso_bounds(const LassoVolume& v);

} // namespace portalens
