#include "portalens/tour.hpp"

#include "portalens/error.hpp"

#include <algorithm>
#include <cmath>

namespace portalens {

ViewSnapshot snapshot_of(const Bookmark& b) {
    return {b.device_pose, b.anchor, b.pinch_zoom, b.pan_offset, b.filter_value};
}

PortalState state_from_snapshot(const ViewSnapshot& s, const PortalState& base) {
    PortalState st = base;
    st.mode = Mode::Clutched;
    st.frozen_device_pose = s.device_pose;
    st.anchor = s.anchor;
    st.pinch_zoom = s.pinch_zoom;
    st.pan_offset = s.pan_offset;
    st.filter_value = s.filter_value;
    st.pinch.reset();
    st.lock.reset();
    return st;
}

ViewTransform snapshot_view(const ViewSnapshot& s, const CameraParams& cam) {
    return make_view(
        adjusted_data_to_eye(s.device_pose, s.anchor, cam, s.pinch_zoom, s.pan_offset), cam);
}

namespace {

double lerp(double a, double b, double u) { return a * (1.0 - u) + b * u; }
Vec3 lerp(Vec3 a, Vec3 b, double u) { return {lerp(a.x, b.x, u), lerp(a.y, b.y, u), lerp(a.z, b.z, u)}; }
double exp_lerp(double a, double b, double u) {
    return std::exp(lerp(std::log(a), std::log(b), u));
}

} // namespace

ViewSnapshot interpolate(const ViewSnapshot& a, const ViewSnapshot& b, double u) {
    if (u <= 0.0) return a;
    if (u >= 1.0) return b;
    ViewSnapshot r;
    r.device_pose = {lerp(a.device_pose.position, b.device_pose.position, u),
                     slerp(a.device_pose.orientation, b.device_pose.orientation, u)};
    r.anchor = {{lerp(a.anchor.pose.position, b.anchor.pose.position, u),
                 slerp(a.anchor.pose.orientation, b.anchor.pose.orientation, u)},
                exp_lerp(a.anchor.scale, b.anchor.scale, u)};
    r.pinch_zoom = exp_lerp(a.pinch_zoom, b.pinch_zoom, u);
    r.pan_offset = {lerp(a.pan_offset.x, b.pan_offset.x, u), lerp(a.pan_offset.y, b.pan_offset.y, u)};
    r.filter_value = lerp(a.filter_value, b.filter_value, u);
    return r;
}

double Tour::total_duration() const { return keyframe_times().back(); }

std::vector<double> Tour::keyframe_times() const {
    std::vector<double> times{0.0};
    for (std::size_t i = 0; i + 1 < keyframes.size(); ++i)
        times.push_back(times.back() + keyframes[i].segment_duration);
    return times;
}

void validate(const Tour& tour, const AnnotationStore* store) {
    if (tour.keyframes.empty()) throw InputError("tour needs at least one keyframe");
    for (const auto& k : tour.keyframes) {
        if (!(k.segment_duration > 0.0) || !std::isfinite(k.segment_duration))
            throw InputError("keyframe duration must be > 0");
        if (store && k.bookmark_id && !store->find_bookmark(*k.bookmark_id))
            throw InputError("tour references unknown bookmark " + std::to_string(*k.bookmark_id));
    }
    const double total = tour.total_duration();
    for (const auto& e : tour.events)
        if (!(e.t_offset >= 0.0 && e.t_offset <= total))
            throw InputError("tour event offset outside the tour");
}

ViewSnapshot sample_tour(const Tour& tour, double t) {
    const auto times = tour.keyframe_times();
    if (!(t > 0.0)) return tour.keyframes.front().snapshot;
    if (t >= times.back()) return tour.keyframes.back().snapshot;
    const std::size_t i = std::size_t(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    if (t == times[i]) return tour.keyframes[i].snapshot;
    double u = (t - times[i]) / tour.keyframes[i].segment_duration;
    if (tour.keyframes[i].ease) u = u * u * (3.0 - 2.0 * u);
    return interpolate(tour.keyframes[i].snapshot, tour.keyframes[i + 1].snapshot, u);
}

Tour tour_from_bookmarks(const AnnotationStore& store, const std::vector<std::uint64_t>& ids,
                         double default_duration, std::uint64_t tour_id) {
    if (ids.empty()) throw InputError("tour needs at least one bookmark");
    if (!(default_duration > 0.0)) throw InputError("tour duration must be > 0");
    Tour tour{tour_id, {}, {}};
    for (auto id : ids) {
        const Bookmark* b = store.find_bookmark(id);
        if (!b) throw InputError("unknown bookmark " + std::to_string(id));
        tour.keyframes.push_back({id, snapshot_of(*b), default_duration, false});
    }
    return tour;
}

void Recorder::start(const PortalState& state) {
    if (armed_) throw InputError("recording already started");
    armed_ = true;
    current_ = {state, {}};
}

Recording Recorder::stop() {
    if (!armed_) throw InputError("record stop without start");
    armed_ = false;
    return std::move(current_);
}

void Recorder::capture(const InputEvent& e) {
    if (armed_) current_.events.push_back(e);
}

Recording record(const std::vector<InputEvent>& stream, const SessionConfig& cfg) {
    PortalState state = initial_state(cfg);
    Recorder rec;
    for (const auto& e : stream) {
        if (std::holds_alternative<ev::RecordStart>(e.payload)) {
            rec.start(state);
        } else if (std::holds_alternative<ev::RecordStop>(e.payload)) {
            return rec.stop();
        } else {
            rec.capture(e);
        }
        state = handle_event(state, e, cfg).state;
    }
    if (!rec.armed()) return {state, {}};
    return rec.stop();
}

std::vector<Mat4> playback_views(const Recording& rec, const SessionConfig& cfg) {
    std::vector<Mat4> views;
    PortalState state = rec.initial;
    for (const auto& e : rec.events) {
        auto tr = handle_event(state, e, cfg);
        state = std::move(tr.state);
        for (const auto& fx : tr.effects)
            if (fx.kind == "VIEW") views.push_back(effective_view(state, cfg.camera, cfg.nav).clip);
    }
    return views;
}

} // namespace portalens
