#pragma once

#include "portalens/constrained_nav.hpp"
#include "portalens/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace portalens {

// ── Input events ────────────────────────────────────────────────

enum class PinColor { Red, Orange, Yellow, Green, Blue, Purple };
enum class PenPhase { Down, Move, Up };

namespace ev {

struct PoseSample { Pose pose; };
struct ClutchDown {};
struct ClutchUp {};
/// `scale` is cumulative relative to the start of the gesture.
struct PinchStart { Vec2 focus; double scale = 1.0; };
struct PinchUpdate { Vec2 focus; double scale = 1.0; };
struct PinchEnd {};
struct PanUpdate { Vec2 delta; };
struct Pen { PenPhase phase = PenPhase::Down; Vec2 point; double pressure = 1.0; };
struct ThumbArc { double value = 0.0; };
struct LassoPoint { Vec2 point; };
struct LassoClose { Vec2 point; };
struct ToolglassPin { PinColor color = PinColor::Red; Vec2 point; std::optional<double> depth; };
struct BookmarkCreate { std::string label; };
struct BookmarkRecall { std::uint64_t id = 0; };
struct TourCreate { std::vector<std::uint64_t> bookmark_ids; double duration = 2.0; };
struct RecordStart {};
struct RecordStop {};
struct LockOn { std::string trajectory_id; Vec2 point; };
struct Unlock {};
struct TubeBegin { double radius = 0.05; };
struct TubeEnd {};
struct TubeRadius { double radius = 0.05; };
struct SelectMode { bool intersect = false; };
struct SelectClear {};

} // namespace ev

using EventPayload =
    std::variant<ev::PoseSample, ev::ClutchDown, ev::ClutchUp, ev::PinchStart, ev::PinchUpdate,
                 ev::PinchEnd, ev::PanUpdate, ev::Pen, ev::ThumbArc, ev::LassoPoint,
                 ev::LassoClose, ev::ToolglassPin, ev::BookmarkCreate, ev::BookmarkRecall,
                 ev::TourCreate, ev::RecordStart, ev::RecordStop, ev::LockOn, ev::Unlock,
                 ev::TubeBegin, ev::TubeEnd, ev::TubeRadius, ev::SelectMode, ev::SelectClear>;

struct InputEvent {
    std::int64_t t_ms = 0;
    EventPayload payload;
};

/// Events that the session hands to the annotation/selection layer while clutched.
bool is_clutched_tool_event(const EventPayload& p);

// ── Effects ─────────────────────────────────────────────────────

/// One line of the effect log: `t_ms<TAB>kind<TAB>detail`, detail escaped as in traces.
struct Effect {
    std::int64_t t_ms = 0;
    std::string kind;
    std::string detail;

    friend bool operator==(const Effect&, const Effect&) = default;
};

std::string format_effect(const Effect& e);
std::string format_matrix(const Mat4& m);
/// %.17g, the round-trip format used by every text output.
std::string format_real(double v);

// ── Portal state ────────────────────────────────────────────────

enum class Mode { Explore, Clutched };

struct PinchGesture {
    double base_zoom = 1.0;
    Vec2 base_pan;
    Vec2 extra_pan; ///< pans received after the gesture started
};

struct PortalState {
    Mode mode = Mode::Explore;
    AnchorFrame anchor;
    Pose frozen_device_pose;  ///< meaningful only while Clutched
    Pose current_device_pose;
    double pinch_zoom = 1.0;
    Vec2 pan_offset;           ///< pixels
    double filter_value = 0.0; ///< thumb-arc time filter in [0, 1]
    std::optional<PinchGesture> pinch;
    std::optional<PathLock> lock;
    std::int64_t last_t_ms = 0;
    bool started = false;      ///< at least one event processed
};

struct SessionConfig {
    CameraParams camera;
    AnchorFrame initial_anchor{Pose::translation({-0.25, -0.25, -1.25}), 0.5};
    bool clutch_toggle = false;
    NavConfig nav;
};

PortalState initial_state(const SessionConfig& cfg);

struct Transition {
    PortalState state;
    std::vector<Effect> effects;
    bool forward = false; ///< event should be routed to the annotation/selection layer
};

/// Pure state transition. Throws InputError on an out-of-order timestamp.
Transition handle_event(const PortalState& state, const InputEvent& e, const SessionConfig& cfg);

/// The view currently on screen: live pose in Explore (or the locked path
/// camera), frozen pose plus pinch/pan adjustment while Clutched.
ViewTransform effective_view(const PortalState& state, const CameraParams& cam,
                             const NavConfig& nav = {});

/// Data-to-eye similarity for a frozen pose with a pinch/pan adjustment applied.
/// Pinch zoom scales about, and pan translates across, the plane orthogonal to
/// the view axis through the cube centre.
Similarity adjusted_data_to_eye(const Pose& frozen, const AnchorFrame& anchor,
                                const CameraParams& cam, double zoom, Vec2 pan);

/// Leaves Clutched mode, folding pinch/pan and device motion into the anchor so
/// the view does not jump. In Explore this is a no-op with a warning effect.
Transition release_clutch(const PortalState& state, const CameraParams& cam,
                          std::int64_t t_ms = 0);

/// Stores the thumb-arc filter value, clamping out-of-range input with a warning.
Transition set_filter(const PortalState& state, double value, std::int64_t t_ms = 0);

std::string_view mode_name(Mode m);
std::string_view pin_color_name(PinColor c);
PinColor parse_pin_color(std::string_view name);

} // namespace portalens
