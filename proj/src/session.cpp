#include "portalens/session.hpp"

#include "portalens/error.hpp"
#include "portalens/io/text.hpp"

#include <cstdio>

namespace portalens {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Effect view_effect(const PortalState& s, const SessionConfig& cfg, std::int64_t t) {
    return {t, "VIEW", format_matrix(effective_view(s, cfg.camera, cfg.nav).clip)};
}

Effect warn(std::int64_t t, std::string msg) { return {t, "WARN", std::move(msg)}; }

} // namespace

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_matrix(const Mat4& m) {
    std::string out;
    for (std::size_t i = 0; i < 16; ++i) {
        if (i) out += ' ';
        out += format_real(m.m[i]);
    }
    return out;
}

std::string format_effect(const Effect& e) {
    // details may carry user labels; keep the line tab-separated
    return std::to_string(e.t_ms) + '\t' + e.kind + '\t' + text::escape(e.detail);
}

std::string_view mode_name(Mode m) { return m == Mode::Explore ? "explore" : "clutched"; }

std::string_view pin_color_name(PinColor c) {
    switch (c) {
    case PinColor::Red: return "red";
    case PinColor::Orange: return "orange";
    case PinColor::Yellow: return "yellow";
    case PinColor::Green: return "green";
    case PinColor::Blue: return "blue";
    case PinColor::Purple: return "purple";
    }
    return "red";
}

PinColor parse_pin_color(std::string_view name) {
    for (auto c : {PinColor::Red, PinColor::Orange, PinColor::Yellow, PinColor::Green,
                   PinColor::Blue, PinColor::Purple})
        if (pin_color_name(c) == name) return c;
    throw InputError("unknown pin color '" + std::string(name) + "'");
}

bool is_clutched_tool_event(const EventPayload& p) {
    return std::holds_alternative<ev::Pen>(p) || std::holds_alternative<ev::LassoPoint>(p) ||
           std::holds_alternative<ev::LassoClose>(p) ||
           std::holds_alternative<ev::ToolglassPin>(p);
}

PortalState initial_state(const SessionConfig& cfg) {
    PortalState s;
    s.anchor = cfg.initial_anchor;
    return s;
}

Similarity adjusted_data_to_eye(const Pose& frozen, const AnchorFrame& anchor,
                                const CameraParams& cam, double zoom, Vec2 pan) {
    const Similarity base = compose(to_similarity(inverse(frozen)), anchor.to_similarity());
    if (zoom == 1.0 && pan.x == 0.0 && pan.y == 0.0) return base;

    double depth = -base.apply({0.5, 0.5, 0.5}).z;
    if (!(depth > cam.near)) depth = 1.0;
    const double metres_per_px = 2.0 * depth * std::tan(0.5 * cam.vertical_fov) / cam.viewport_h;
    const Vec3 pivot{0.0, 0.0, -depth};
    const Vec3 shift{pan.x * metres_per_px, -pan.y * metres_per_px, 0.0};
    const Similarity adj{Quat::identity(), (1.0 - zoom) * pivot + shift, zoom};
    return compose(adj, base);
}

ViewTransform effective_view(const PortalState& s, const CameraParams& cam, const NavConfig& nav) {
    if (s.mode == Mode::Clutched)
        return make_view(
            adjusted_data_to_eye(s.frozen_device_pose, s.anchor, cam, s.pinch_zoom, s.pan_offset),
            cam);
    if (s.lock) return locked_view(*s.lock, s.anchor, cam, nav.hover_offset);
    return view_from_pose(s.current_device_pose, s.anchor, cam);
}

Transition release_clutch(const PortalState& state, const CameraParams& cam, std::int64_t t_ms) {
    Transition tr{state, {}, false};
    if (state.mode != Mode::Clutched) {
        tr.effects.push_back(warn(t_ms, "release_clutch ignored in explore"));
        return tr;
    }
    PortalState& s = tr.state;
    const Similarity adjusted = adjusted_data_to_eye(s.frozen_device_pose, s.anchor, cam,
                                                     s.pinch_zoom, s.pan_offset);
    s.anchor = AnchorFrame::from_similarity(compose(to_similarity(s.current_device_pose), adjusted));
    s.mode = Mode::Explore;
    s.pinch_zoom = 1.0;
    s.pan_offset = {};
    s.pinch.reset();
    tr.effects.push_back({t_ms, "MODE", "explore"});
    return tr;
}

Transition set_filter(const PortalState& state, double value, std::int64_t t_ms) {
    Transition tr{state, {}, false};
    if (!(value >= 0.0 && value <= 1.0)) {
        tr.effects.push_back(warn(t_ms, "filter value " + format_real(value) + " clamped"));
        value = value > 1.0 ? 1.0 : 0.0; // NaN clamps to 0
    }
    tr.state.filter_value = value;
    tr.effects.push_back({t_ms, "FILTER", format_real(value)});
    return tr;
}

Transition handle_event(const PortalState& state, const InputEvent& e, const SessionConfig& cfg) {
    if (state.started && e.t_ms < state.last_t_ms)
        throw InputError("out-of-order timestamp " + std::to_string(e.t_ms) + " < " +
                         std::to_string(state.last_t_ms));

    Transition tr{state, {}, false};
    tr.state.last_t_ms = e.t_ms;
    tr.state.started = true;
    PortalState& s = tr.state;
    auto& fx = tr.effects;
    const std::int64_t t = e.t_ms;
    const Vec2 centre{0.5 * cfg.camera.viewport_w, 0.5 * cfg.camera.viewport_h};

    auto release = [&] {
        auto r = release_clutch(s, cfg.camera, t);
        s = r.state;
        fx.insert(fx.end(), r.effects.begin(), r.effects.end());
        fx.push_back(view_effect(s, cfg, t));
    };
    auto apply_pinch = [&](Vec2 focus, double k) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            fx.push_back(warn(t, "pinch scale must be positive"));
            return;
        }
        const PinchGesture g = *s.pinch;
        s.pinch_zoom = g.base_zoom * k;
        s.pan_offset = g.extra_pan + (k * g.base_pan + (1.0 - k) * (focus - centre));
        fx.push_back(view_effect(s, cfg, t));
    };

    std::visit(
        overloaded{
            [&](const ev::PoseSample& p) {
                const Pose prev = s.current_device_pose;
                s.current_device_pose = {p.pose.position, p.pose.orientation.normalized()};
                if (s.mode == Mode::Explore) {
                    if (s.lock)
                        s.lock = step(*s.lock, s.current_device_pose.position - prev.position,
                                      s.anchor.pose.orientation);
                    fx.push_back(view_effect(s, cfg, t));
                }
            },
            [&](const ev::ClutchDown&) {
                if (s.mode == Mode::Clutched) {
                    if (cfg.clutch_toggle)
                        release();
                    else
                        fx.push_back(warn(t, "clutch already held"));
                    return;
                }
                s.frozen_device_pose = s.current_device_pose;
                if (s.lock) {
                    s.frozen_device_pose = locked_device_pose(*s.lock, s.anchor, cfg.nav.hover_offset);
                    s.lock.reset();
                    fx.push_back({t, "UNLOCK", "clutch"});
                }
                s.mode = Mode::Clutched;
                s.pinch_zoom = 1.0;
                s.pan_offset = {};
                fx.push_back({t, "MODE", "clutched"});
            },
            [&](const ev::ClutchUp&) {
                if (cfg.clutch_toggle) return;
                if (s.mode == Mode::Explore) {
                    fx.push_back(warn(t, "clutch release ignored in explore"));
                    return;
                }
                release();
            },
            [&](const ev::PinchStart& p) {
                if (s.mode == Mode::Explore) {
                    fx.push_back(warn(t, "pinch ignored in explore"));
                    return;
                }
                s.pinch = PinchGesture{s.pinch_zoom, s.pan_offset, {}};
                if (p.scale != 1.0) apply_pinch(p.focus, p.scale);
            },
            [&](const ev::PinchUpdate& p) {
                if (s.mode == Mode::Explore) {
                    fx.push_back(warn(t, "pinch ignored in explore"));
                    return;
                }
                if (!s.pinch) s.pinch = PinchGesture{s.pinch_zoom, s.pan_offset, {}};
                apply_pinch(p.focus, p.scale);
            },
            [&](const ev::PinchEnd&) { s.pinch.reset(); },
            [&](const ev::PanUpdate& p) {
                if (s.mode == Mode::Explore) {
                    fx.push_back(warn(t, "pan ignored in explore"));
                    return;
                }
                s.pan_offset = s.pan_offset + p.delta;
                if (s.pinch) s.pinch->extra_pan = s.pinch->extra_pan + p.delta;
                fx.push_back(view_effect(s, cfg, t));
            },
            [&](const ev::ThumbArc& a) {
                auto r = set_filter(s, a.value, t);
                s = r.state;
                fx.insert(fx.end(), r.effects.begin(), r.effects.end());
            },
            [&](const auto&) {
                if (is_clutched_tool_event(e.payload) && s.mode != Mode::Clutched) {
                    fx.push_back(warn(t, "pen/lasso/pin input ignored in explore"));
                    return;
                }
                tr.forward = true;
            },
        },
        e.payload);
    return tr;
}

} // namespace portalens
