#pragma once

#include "portalens/dataset.hpp"
#include "portalens/session.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace portalens {

struct Pin {
    std::uint64_t id = 0;
    PinColor color = PinColor::Red;
    Vec3 position; ///< data units

    friend bool operator==(const Pin&, const Pin&) = default;
};

enum class StrokeAnchor {
    ViewPlane, ///< screen pixels, bound to the frozen view it was drawn on
    World,     ///< data units
};

struct StrokePoint {
    std::int64_t t_ms = 0;
    Vec3 point; ///< ViewPlane: (x px, y px, 0)
    double pressure = 1.0;

    friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

struct InkStroke {
    std::uint64_t id = 0;
    StrokeAnchor anchor = StrokeAnchor::ViewPlane;
    std::vector<StrokePoint> points;

    friend bool operator==(const InkStroke&, const InkStroke&) = default;
};

void validate(const InkStroke& s);

struct Bookmark {
    std::uint64_t id = 0;
    std::int64_t created_at = 0;
    Pose device_pose;
    AnchorFrame anchor;
    double pinch_zoom = 1.0;
    Vec2 pan_offset;
    double filter_value = 0.0;
    std::vector<std::uint64_t> stroke_ids;
    std::string label;

    friend bool operator==(const Bookmark&, const Bookmark&) = default;
};

/// Bookmarks, pins and strokes of one session. Ids are assigned monotonically
/// per kind, starting at 1.
class AnnotationStore {
public:
    const std::map<std::uint64_t, Bookmark>& bookmarks() const { return bookmarks_; }
    const std::map<std::uint64_t, Pin>& pins() const { return pins_; }
    const std::map<std::uint64_t, InkStroke>& strokes() const { return strokes_; }

    const Bookmark* find_bookmark(std::uint64_t id) const;
    const InkStroke* find_stroke(std::uint64_t id) const;

    const Pin& add_pin(PinColor color, Vec3 position);
    const InkStroke& add_stroke(StrokeAnchor anchor, std::vector<StrokePoint> points);
    /// Throws InputError when a referenced stroke does not exist.
    const Bookmark& add_bookmark(Bookmark b);

    /// Restores objects with their persisted ids (loading a state file).
    void restore(Bookmark b);
    void restore(Pin p);
    void restore(InkStroke s);

    std::uint64_t next_bookmark_id() const { return next_bookmark_; }
    std::uint64_t next_pin_id() const { return next_pin_; }
    std::uint64_t next_stroke_id() const { return next_stroke_; }

    friend bool operator==(const AnnotationStore&, const AnnotationStore&) = default;

private:
    std::map<std::uint64_t, Bookmark> bookmarks_;
    std::map<std::uint64_t, Pin> pins_;
    std::map<std::uint64_t, InkStroke> strokes_;
    std::uint64_t next_bookmark_ = 1, next_pin_ = 1, next_stroke_ = 1;
};

struct PinPlacement {
    double pick_radius_px = 10.0;
};

/// Position a toolglass pin would take. With no explicit depth the pin snaps to
/// the nearest visible sample within the pick radius on screen, otherwise to
/// the middle of the ray's span through the cube. Requires Clutched mode;
/// throws InputError when the ray misses the cube.
Vec3 pin_position(const PortalState& state, const CameraParams& cam, const Dataset& ds,
                  Vec2 screen, std::optional<double> depth, const PinPlacement& cfg = {});

const Pin& place_pin(AnnotationStore& store, const PortalState& state, const CameraParams& cam,
                     const Dataset& ds, PinColor color, Vec2 screen,
                     std::optional<double> depth = std::nullopt, const PinPlacement& cfg = {});

/// Snapshots the on-screen view. In Explore the current pose is used with
/// zoom 1 and no pan.
const Bookmark& create_bookmark(AnnotationStore& store, const PortalState& state,
                                std::string label, std::vector<std::uint64_t> strokes,
                                std::int64_t t_ms = 0);

struct ProximityConfig {
    double radius_m = 0.5;
    double max_angle = std::numbers::pi / 3.0;
};

struct BookmarkHit {
    std::uint64_t id = 0;
    double distance = 0.0;
    double angle = 0.0;

    friend bool operator==(const BookmarkHit&, const BookmarkHit&) = default;
};

/// Bookmarks within radius and angular tolerance of the query pose, nearest
/// first, ties by id.
std::vector<BookmarkHit> nearby_bookmarks(const AnnotationStore& store, const Pose& query,
                                          const ProximityConfig& cfg = {});

/// Enters Clutched at the bookmark's frozen view with its zoom, pan and filter.
/// Throws InputError on a dangling stroke reference.
PortalState recall_bookmark(const PortalState& state, const AnnotationStore& store,
                            const Bookmark& bookmark);

} // namespace portalens
