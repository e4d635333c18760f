#pragma once

#include "portalens/annotate.hpp"
#include "portalens/session.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace portalens {

/// Everything needed to reproduce one on-screen view.
struct ViewSnapshot {
    Pose device_pose;
    AnchorFrame anchor;
    double pinch_zoom = 1.0;
    Vec2 pan_offset;
    double filter_value = 0.0;

    friend bool operator==(const ViewSnapshot&, const ViewSnapshot&) = default;
};

ViewSnapshot snapshot_of(const Bookmark& b);
/// Clutched portal state showing the snapshot.
PortalState state_from_snapshot(const ViewSnapshot& s, const PortalState& base = {});
ViewTransform snapshot_view(const ViewSnapshot& s, const CameraParams& cam);

/// Interpolates between two snapshots: positions and pan/filter linearly,
/// orientations by slerp, zoom and anchor scale geometrically. u = 0 and u = 1
/// return the endpoints exactly.
ViewSnapshot interpolate(const ViewSnapshot& a, const ViewSnapshot& b, double u);

struct TourKeyframe {
    std::optional<std::uint64_t> bookmark_id; ///< source bookmark, if any
    ViewSnapshot snapshot;
    double segment_duration = 2.0; ///< seconds to the next keyframe; ignored on the last
    bool ease = false;             ///< smoothstep the segment starting here

    friend bool operator==(const TourKeyframe&, const TourKeyframe&) = default;
};

enum class TourEventKind { Stroke, Audio, Label };

struct TourEvent {
    double t_offset = 0.0; ///< seconds from tour start
    TourEventKind kind = TourEventKind::Label;
    std::uint64_t stroke_id = 0; ///< Stroke
    std::string text;            ///< Audio: opaque path; Label: text
    double audio_offset = 0.0;   ///< Audio: seconds into the clip

    friend bool operator==(const TourEvent&, const TourEvent&) = default;
};

struct Tour {
    std::uint64_t id = 0;
    std::vector<TourKeyframe> keyframes;
    std::vector<TourEvent> events;

    double total_duration() const;
    /// Start time of every keyframe.
    std::vector<double> keyframe_times() const;

    friend bool operator==(const Tour&, const Tour&) = default;
};

/// Throws InputError when the tour breaks its invariants (no keyframes,
/// nonpositive durations, events outside the tour, dangling bookmark ids when
/// a store is given).
void validate(const Tour& tour, const AnnotationStore* store = nullptr);

/// State at time t (seconds, clamped to [0, total]).
ViewSnapshot sample_tour(const Tour& tour, double t);

/// Keyframes in the given order, each lasting `default_duration`.
Tour tour_from_bookmarks(const AnnotationStore& store, const std::vector<std::uint64_t>& ids,
                         double default_duration = 2.0, std::uint64_t tour_id = 1);

/// Captured input between a start and stop marker, with the portal state at start.
struct Recording {
    PortalState initial;
    std::vector<InputEvent> events;
};

/// Arms on RecordStart, captures every event verbatim until RecordStop.
class Recorder {
public:
    bool armed() const { return armed_; }
    void start(const PortalState& state);
    /// Throws InputError when not recording.
    Recording stop();
    void capture(const InputEvent& e);

private:
    bool armed_ = false;
    Recording current_;
};

/// Extracts the first RecordStart..RecordStop interval of a stream, folding the
/// events before it to obtain the starting state.
Recording record(const std::vector<InputEvent>& stream, const SessionConfig& cfg);

/// View matrices produced by replaying the recording through the session, in
/// event order: the live VIEW effect sequence for that interval.
std::vector<Mat4> playback_views(const Recording& rec, const SessionConfig& cfg);

} // namespace portalens
