#include "portalens/engine.hpp"

#include "portalens/error.hpp"

#include <algorithm>

namespace portalens {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ',';
        out += id;
    }
    return out;
}

std::string vec3_text(Vec3 p) {
    return format_real(p.x) + ' ' + format_real(p.y) + ' ' + format_real(p.z);
}

} // namespace

Engine::Engine(std::shared_ptr<const Dataset> dataset, EngineConfig cfg)
    : dataset_(std::move(dataset)), cfg_(std::move(cfg)), state_(initial_state(cfg_.session)) {
    if (!dataset_) dataset_ = std::make_shared<const Dataset>();
    cfg_.session.camera.validate();
}

ViewTransform Engine::view() const {
    return effective_view(state_, cfg_.session.camera, cfg_.session.nav);
}

Effect Engine::view_effect(std::int64_t t) const { return {t, "VIEW", format_matrix(view().clip)}; }

Effect Engine::select_effect(std::int64_t t) const {
    const auto ids = selection_.ids();
    return {t, "SELECT", std::to_string(ids.size()) + (ids.empty() ? "" : " " + join_ids(ids))};
}

std::vector<Effect> Engine::dispatch(const InputEvent& e) {
    const Mode before = state_.mode;
    Transition tr = handle_event(state_, e, cfg_.session);

    const bool marker = std::holds_alternative<ev::RecordStart>(e.payload) ||
                        std::holds_alternative<ev::RecordStop>(e.payload);
    if (!marker) recorder_.capture(e);

    state_ = std::move(tr.state);
    std::vector<Effect> fx = std::move(tr.effects);

    if (tube_capture_) {
        if (const auto* p = std::get_if<ev::PoseSample>(&e.payload))
            tube_capture_->control_points.push_back(
                inverse(state_.anchor.to_similarity()).apply(p->pose.position));
    }
    if (tr.forward) {
        try {
            forward(e, fx);
        } catch (const InputError& err) {
            fx.push_back({e.t_ms, "ERROR", err.what()});
        }
    }
    if (state_.mode != before) on_mode_change(before);

    log_.insert(log_.end(), fx.begin(), fx.end());
    return fx;
}

void Engine::on_mode_change(Mode before) {
    if (before == Mode::Explore) {
        clutch_strokes_.clear();
        return;
    }
    // Leaving a frozen view: screen-bound ink and in-progress input no longer apply.
    for (auto it = visible_strokes_.begin(); it != visible_strokes_.end();) {
        const InkStroke* s = store_.find_stroke(*it);
        it = (s && s->anchor == StrokeAnchor::ViewPlane) ? visible_strokes_.erase(it) : std::next(it);
    }
    clutch_strokes_.clear();
    lasso_.clear();
    pen_.clear();
}

void Engine::run_lasso(std::vector<Effect>& fx, std::int64_t t) {
    std::vector<Vec2> polygon = std::move(lasso_);
    lasso_.clear();
    LassoVolume volume = make_lasso(std::move(polygon), view());
    SelectOptions opt;
    opt.filter_value = state_.filter_value;
    opt.subdivisions = cfg_.lasso_subdivisions;
    opt.intersect_mode = cfg_.intersect_mode;
    if (intersect_) {
        volumes_.push_back(std::move(volume));
        selection_ = intersect_select(*dataset_, volumes_, opt);
    } else {
        selection_ = lasso_select(*dataset_, volume, opt);
    }
    fx.push_back(select_effect(t));
}

void Engine::run_tube(std::vector<Effect>& fx, std::int64_t t) {
    SelectOptions opt;
    opt.filter_value = state_.filter_value;
    selection_ = tube_select(*dataset_, *tube_, opt);
    fx.push_back(select_effect(t));
}

void Engine::forward(const InputEvent& e, std::vector<Effect>& fx) {
    const std::int64_t t = e.t_ms;
    std::visit(
        overloaded{
            [&](const ev::Pen& p) {
                const StrokePoint sp{t, {p.point.x, p.point.y, 0.0}, p.pressure};
                if (p.phase == PenPhase::Down) pen_.clear();
                pen_.push_back(sp);
                if (p.phase != PenPhase::Up) return;
                std::vector<StrokePoint> pts = std::move(pen_);
                pen_.clear();
                const InkStroke& s = store_.add_stroke(StrokeAnchor::ViewPlane, std::move(pts));
                clutch_strokes_.push_back(s.id);
                visible_strokes_.insert(s.id);
                fx.push_back({t, "STROKE", std::to_string(s.id) + " viewplane " +
                                               std::to_string(s.points.size())});
            },
            [&](const ev::LassoPoint& p) { lasso_.push_back(p.point); },
            [&](const ev::LassoClose& p) {
                lasso_.push_back(p.point);
                run_lasso(fx, t);
            },
            [&](const ev::ToolglassPin& p) {
                const Pin& pin = place_pin(store_, state_, cfg_.session.camera, *dataset_, p.color,
                                           p.point, p.depth, cfg_.pins);
                fx.push_back({t, "PIN", std::to_string(pin.id) + ' ' +
                                            std::string(pin_color_name(pin.color)) + ' ' +
                                            vec3_text(pin.position)});
            },
            [&](const ev::BookmarkCreate& b) {
                const Bookmark& bm = create_bookmark(store_, state_, b.label, clutch_strokes_, t);
                fx.push_back({t, "BOOKMARK", std::to_string(bm.id) + ' ' + bm.label});
            },
            [&](const ev::BookmarkRecall& r) {
                const Bookmark* bm = store_.find_bookmark(r.id);
                if (!bm) throw InputError("unknown bookmark " + std::to_string(r.id));
                const Mode before = state_.mode;
                state_ = recall_bookmark(state_, store_, *bm);
                if (before != Mode::Clutched) {
                    on_mode_change(before);
                    fx.push_back({t, "MODE", "clutched"});
                }
                visible_strokes_.insert(bm->stroke_ids.begin(), bm->stroke_ids.end());
                clutch_strokes_ = bm->stroke_ids;
                fx.push_back({t, "RECALL", std::to_string(bm->id)});
                fx.push_back(view_effect(t));
            },
            [&](const ev::TourCreate& c) {
                Tour tour = tour_from_bookmarks(store_, c.bookmark_ids, c.duration, next_tour_id_);
                ++next_tour_id_;
                fx.push_back({t, "TOUR", std::to_string(tour.id) + ' ' +
                                             std::to_string(tour.keyframes.size()) + ' ' +
                                             format_real(tour.total_duration())});
                tours_.emplace(tour.id, std::move(tour));
            },
            [&](const ev::RecordStart&) {
                recorder_.start(state_);
                fx.push_back({t, "RECORD", "start"});
            },
            [&](const ev::RecordStop&) {
                recordings_.push_back(recorder_.stop());
                fx.push_back({t, "RECORD", "stop " + std::to_string(recordings_.back().events.size())});
            },
            [&](const ev::LockOn& l) {
                if (state_.mode != Mode::Explore) throw InputError("lock-on requires explore mode");
                const auto idx = dataset_->find(l.trajectory_id);
                if (idx < 0) throw InputError("unknown trajectory '" + l.trajectory_id + "'");
                state_.lock = lock_on(*dataset_, std::size_t(idx), l.point, view(), cfg_.session.nav);
                fx.push_back({t, "LOCK", l.trajectory_id + ' ' + format_real(state_.lock->arc_length)});
                fx.push_back(view_effect(t));
            },
            [&](const ev::Unlock&) {
                if (!state_.lock) throw InputError("not locked");
                state_.lock.reset();
                fx.push_back({t, "UNLOCK", "user"});
                fx.push_back(view_effect(t));
            },
            [&](const ev::TubeBegin& b) {
                if (!(b.radius > 0.0)) throw InputError("tube radius must be > 0");
                tube_capture_ = TubeSelector{{}, b.radius};
                fx.push_back({t, "TUBE", "begin"});
            },
            [&](const ev::TubeEnd&) {
                if (!tube_capture_) throw InputError("tube end without begin");
                TubeSelector captured = std::move(*tube_capture_);
                tube_capture_.reset();
                validate(captured);
                tube_ = std::move(captured);
                std::vector<StrokePoint> pts;
                for (const Vec3& p : tube_->control_points) pts.push_back({t, p, 1.0});
                const InkStroke& s = store_.add_stroke(StrokeAnchor::World, std::move(pts));
                visible_strokes_.insert(s.id);
                fx.push_back({t, "TUBE", "end " + std::to_string(tube_->control_points.size()) +
                                             " stroke " + std::to_string(s.id)});
                run_tube(fx, t);
            },
            [&](const ev::TubeRadius& r) {
                if (!tube_) throw InputError("no tube to edit");
                tube_ = edit_tube_radius(*tube_, r.radius);
                run_tube(fx, t);
            },
            [&](const ev::SelectMode& m) {
                intersect_ = m.intersect;
                volumes_.clear();
                fx.push_back({t, "SELECT_MODE", m.intersect ? "intersect" : "replace"});
            },
            [&](const ev::SelectClear&) {
                selection_ = {};
                volumes_.clear();
                tube_.reset();
                fx.push_back(select_effect(t));
            },
            [&](const auto&) {},
        },
        e.payload);
}

std::vector<bool> Engine::selected_flags() const {
    std::vector<bool> flags(dataset_->trajectory_count(), false);
    for (const auto& entry : selection_.entries) {
        const auto idx = dataset_->find(entry.id);
        if (idx >= 0) flags[std::size_t(idx)] = true;
    }
    return flags;
}

RenderOverlays Engine::overlays() const {
    RenderOverlays o;
    o.filter_value = state_.filter_value;
    o.selected = selected_flags();
    for (const auto& [id, pin] : store_.pins()) o.pins.push_back(pin);
    for (auto sid : visible_strokes_) {
        const InkStroke* s = store_.find_stroke(sid);
        if (!s) continue;
        if (s->anchor == StrokeAnchor::ViewPlane) {
            std::vector<Vec2> pts;
            for (const auto& p : s->points) pts.push_back({p.point.x, p.point.y});
            o.screen_strokes.push_back(std::move(pts));
        } else {
            std::vector<Vec3> pts;
            for (const auto& p : s->points) pts.push_back(p.point);
            o.world_strokes.push_back(std::move(pts));
        }
    }
    o.lasso = lasso_;
    if (tube_) o.tube = tube_->control_points;
    return o;
}

Image Engine::render() const { return render_frame(*dataset_, view(), overlays()); }

std::vector<std::string> Engine::visible_ids() const {
    std::vector<std::string> ids;
    for (std::size_t t = 0; t < dataset_->trajectory_count(); ++t)
        for (std::size_t g = dataset_->first_sample(t); g < dataset_->end_sample(t); ++g)
            if (time_visible(dataset_->time(g), state_.filter_value)) {
                ids.push_back(dataset_->trajectory(t).id);
                break;
            }
    return ids;
}

SessionSnapshot Engine::snapshot() const {
    SessionSnapshot s{state_, std::nullopt, store_, tours_};
    if (state_.lock)
        s.lock = LockRecord{state_.lock->trajectory_id, state_.lock->arc_length, state_.lock->gain};
    return s;
}

} // namespace portalens
