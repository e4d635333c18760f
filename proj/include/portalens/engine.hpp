#pragma once

#include "portalens/annotate.hpp"
#include "portalens/dataset.hpp"
#include "portalens/io/render.hpp"
#include "portalens/selection.hpp"
#include "portalens/session.hpp"
#include "portalens/tour.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace portalens {

struct EngineConfig {
    SessionConfig session;
    PinPlacement pins;
    ProximityConfig proximity;
    int lasso_subdivisions = 64;
    IntersectMode intersect_mode = IntersectMode::PerSample;
    double default_tour_duration = 2.0;
};

/// Path lock as persisted: the path itself is rebuilt from the dataset.
struct LockRecord {
    std::string trajectory_id;
    double arc_length = 0.0;
    double gain = 1.0;

    friend bool operator==(const LockRecord&, const LockRecord&) = default;
};

/// Persistent part of a session: what a state file holds.
struct SessionSnapshot {
    PortalState state;
    std::optional<LockRecord> lock;
    AnnotationStore store;
    std::map<std::uint64_t, Tour> tours;
};

/// One interactive session: the portal state machine plus the annotation,
/// selection and tour layers it forwards clutched input to. Owned by a single
/// caller; the dataset is shared read-only.
class Engine {
public:
    Engine(std::shared_ptr<const Dataset> dataset, EngineConfig cfg = {});

    /// Processes one event and returns the effects it emitted (also appended to
    /// effect_log()). Throws InputError for an out-of-order timestamp; other
    /// command failures are reported as ERROR effects.
    std::vector<Effect> dispatch(const InputEvent& e);

    const PortalState& state() const { return state_; }
    const AnnotationStore& store() const { return store_; }
    const std::map<std::uint64_t, Tour>& tours() const { return tours_; }
    const SelectionResult& selection() const { return selection_; }
    const std::vector<Recording>& recordings() const { return recordings_; }
    const std::vector<Effect>& effect_log() const { return log_; }
    const Dataset& dataset() const { return *dataset_; }
    const EngineConfig& config() const { return cfg_; }

    ViewTransform view() const;
    RenderOverlays overlays() const;
    Image render() const;
    /// Trajectory ids with at least one time-visible sample.
    std::vector<std::string> visible_ids() const;

    SessionSnapshot snapshot() const;

private:
    void forward(const InputEvent& e, std::vector<Effect>& fx);
    void on_mode_change(Mode before);
    void run_lasso(std::vector<Effect>& fx, std::int64_t t);
    void run_tube(std::vector<Effect>& fx, std::int64_t t);
    Effect select_effect(std::int64_t t) const;
    Effect view_effect(std::int64_t t) const;
    std::vector<bool> selected_flags() const;

    std::shared_ptr<const Dataset> dataset_;
    EngineConfig cfg_;
    PortalState state_;
    AnnotationStore store_;
    std::map<std::uint64_t, Tour> tours_;
    std::uint64_t next_tour_id_ = 1;

    SelectionResult selection_;
    bool intersect_ = false;
    std::vector<LassoVolume> volumes_;
    std::vector<Vec2> lasso_;
    std::optional<TubeSelector> tube_;
    std::optional<TubeSelector> tube_capture_;

    std::vector<StrokePoint> pen_;
    std::vector<std::uint64_t> clutch_strokes_; ///< drawn since the clutch engaged
    std::set<std::uint64_t> visible_strokes_;

    Recorder recorder_;
    std::vector<Recording> recordings_;
    std::vector<Effect> log_;
};

} // namespace portalens
