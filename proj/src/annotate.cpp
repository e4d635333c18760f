#include "portalens/annotate.hpp"

#include "portalens/error.hpp"

#include <algorithm>

namespace portalens {

void validate(const InkStroke& s) {
    if (s.points.empty()) throw InputError("stroke needs at least one point");
    for (std::size_t i = 1; i < s.points.size(); ++i)
        if (s.points[i].t_ms < s.points[i - 1].t_ms)
            throw InputError("stroke timestamps must be nondecreasing");
    for (const auto& p : s.points)
        if (!(p.pressure >= 0.0 && p.pressure <= 1.0))
            throw InputError("stroke pressure must be in [0, 1]");
}

const Bookmark* AnnotationStore::find_bookmark(std::uint64_t id) const {
    const auto it = bookmarks_.find(id);
    return it == bookmarks_.end() ? nullptr : &it->second;
}

const InkStroke* AnnotationStore::find_stroke(std::uint64_t id) const {
    const auto it = strokes_.find(id);
    return it == strokes_.end() ? nullptr : &it->second;
}

const Pin& AnnotationStore::add_pin(PinColor color, Vec3 position) {
    if (!is_finite(position)) throw InputError("pin position is not finite");
    const std::uint64_t id = next_pin_++;
    return pins_[id] = Pin{id, color, position};
}

const InkStroke& AnnotationStore::add_stroke(StrokeAnchor anchor, std::vector<StrokePoint> points) {
    InkStroke s{next_stroke_, anchor, std::move(points)};
    validate(s);
    ++next_stroke_;
    return strokes_[s.id] = std::move(s);
}

const Bookmark& AnnotationStore::add_bookmark(Bookmark b) {
    for (auto sid : b.stroke_ids)
        if (!find_stroke(sid))
            throw InputError("bookmark references unknown stroke " + std::to_string(sid));
    b.id = next_bookmark_++;
    return bookmarks_[b.id] = std::move(b);
}

void AnnotationStore::restore(Bookmark b) {
    next_bookmark_ = std::max(next_bookmark_, b.id + 1);
    bookmarks_[b.id] = std::move(b);
}

void AnnotationStore::restore(Pin p) {
    next_pin_ = std::max(next_pin_, p.id + 1);
    pins_[p.id] = p;
}

void AnnotationStore::restore(InkStroke s) {
    next_stroke_ = std::max(next_stroke_, s.id + 1);
    strokes_[s.id] = std::move(s);
}

Vec3 pin_position(const PortalState& state, const CameraParams& cam, const Dataset& ds,
                  Vec2 screen, std::optional<double> depth, const PinPlacement& cfg) {
    if (state.mode != Mode::Clutched) throw InputError("pins are placed on a clutched view");
    const ViewTransform view = effective_view(state, cam);
    const Ray ray = unproject_ray(view, screen);
    const auto span = intersect_unit_cube(ray);
    if (!span) throw InputError("pin ray misses the data cube");

    if (depth) {
        const double s = view.data_to_eye.scale;
        if (!(*depth >= cam.near / s && *depth <= cam.far / s))
            throw InputError("pin depth outside camera range");
        return point_at_depth(view, screen, *depth);
    }

    std::size_t best = ds.sample_count();
    double best_dist = cfg.pick_radius_px, best_depth = 0.0;
    for (std::size_t g = 0; g < ds.sample_count(); ++g) {
        if (!time_visible(ds.time(g), state.filter_value)) continue;
        const auto p = project_point(view, ds.position(g));
        if (!p) continue;
        const double d = norm(p->screen - screen);
        if (d > best_dist) continue;
        if (best == ds.sample_count() || d < best_dist || p->depth < best_depth) {
            best = g;
            best_dist = d;
            best_depth = p->depth;
        }
    }
    if (best < ds.sample_count()) return ds.position(best);

    const double mid = 0.5 * ((*span)[0] + (*span)[1]);
    return ray.origin + mid * ray.direction;
}

const Pin& place_pin(AnnotationStore& store, const PortalState& state, const CameraParams& cam,
                     const Dataset& ds, PinColor color, Vec2 screen, std::optional<double> depth,
                     const PinPlacement& cfg) {
    return store.add_pin(color, pin_position(state, cam, ds, screen, depth, cfg));
}

const Bookmark& create_bookmark(AnnotationStore& store, const PortalState& state,
                                std::string label, std::vector<std::uint64_t> strokes,
                                std::int64_t t_ms) {
    Bookmark b;
    b.created_at = t_ms;
    b.anchor = state.anchor;
    b.filter_value = state.filter_value;
    b.stroke_ids = std::move(strokes);
    b.label = std::move(label);
    if (state.mode == Mode::Clutched) {
        b.device_pose = state.frozen_device_pose;
        b.pinch_zoom = state.pinch_zoom;
        b.pan_offset = state.pan_offset;
    } else {
        b.device_pose = state.current_device_pose;
    }
    return store.add_bookmark(std::move(b));
}

std::vector<BookmarkHit> nearby_bookmarks(const AnnotationStore& store, const Pose& query,
                                          const ProximityConfig& cfg) {
    if (!(cfg.radius_m > 0.0)) throw InputError("proximity radius must be > 0");
    std::vector<BookmarkHit> hits;
    for (const auto& [id, b] : store.bookmarks()) {
        const double d = norm(b.device_pose.position - query.position);
        const double a = geodesic_angle(b.device_pose.orientation, query.orientation);
        if (d <= cfg.radius_m && a <= cfg.max_angle) hits.push_back({id, d, a});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const BookmarkHit& x, const BookmarkHit& y) {
        return x.distance != y.distance ? x.distance < y.distance : x.id < y.id;
    });
    return hits;
}

PortalState recall_bookmark(const PortalState& state, const AnnotationStore& store,
                            const Bookmark& bookmark) {
    for (auto sid : bookmark.stroke_ids)
        if (!store.find_stroke(sid))
            throw InputError("bookmark " + std::to_string(bookmark.id) +
                             " references missing stroke " + std::to_string(sid));
    PortalState s = state;
    s.mode = Mode::Clutched;
    s.frozen_device_pose = bookmark.device_pose;
    s.anchor = bookmark.anchor;
    s.pinch_zoom = bookmark.pinch_zoom;
    s.pan_offset = bookmark.pan_offset;
    s.filter_value = bookmark.filter_value;
    s.pinch.reset();
    s.lock.reset();
    return s;
}

} // namespace portalens
