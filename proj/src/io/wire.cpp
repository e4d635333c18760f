#include "portalens/io/wire.hpp"

#include "portalens/error.hpp"
#include "portalens/io/state_file.hpp"
#include "portalens/io/trace.hpp"

#include <cmath>

namespace portalens {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

json vec(Vec2 v) { return json::array({v.x, v.y}); }
json vec(Vec3 v) { return json::array({v.x, v.y, v.z}); }

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
    return *it;
}

double real(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::string str(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t uint(const json& v, const char* key) {
    if (!v.is_number_unsigned()) throw InputError(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> reals(const json& j, const char* key, std::size_t n) {
    const json& v = field(j, key);
    if (!v.is_array() || v.size() != n)
        throw InputError(std::string("field '") + key + "' must be an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw InputError(std::string("field '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Vec2 vec2(const json& j, const char* key) {
    const auto v = reals(j, key, 2);
    return {v[0], v[1]};
}

std::string_view phase_name(PenPhase p) {
    return p == PenPhase::Down ? "down" : p == PenPhase::Move ? "move" : "up";
}

json mat(const Mat4& m) { return json(m.m); }

json selection_json(const SelectionResult& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        json ranges = json::array();
        for (const auto& rg : e.ranges) ranges.push_back({rg.first, rg.last});
        entries.push_back({{"id", e.id}, {"ranges", ranges}});
    }
    return entries;
}

json error_reply(const json& seq, const std::string& msg) {
    return {{"type", "error"}, {"seq", seq}, {"message", msg}};
}

} // namespace

json event_to_json(const InputEvent& e) {
    json j{{"type", "event"}, {"t_ms", e.t_ms}, {"event", std::string(event_name(e.payload))}};
    std::visit(overloaded{
                   [&](const ev::PoseSample& p) {
                       const auto& q = p.pose.orientation;
                       j["position"] = vec(p.pose.position);
                       j["orientation"] = json::array({q.w, q.x, q.y, q.z});
                   },
                   [&](const ev::PinchStart& p) { j["focus"] = vec(p.focus), j["scale"] = p.scale; },
                   [&](const ev::PinchUpdate& p) { j["focus"] = vec(p.focus), j["scale"] = p.scale; },
                   [&](const ev::PanUpdate& p) { j["delta"] = vec(p.delta); },
                   [&](const ev::Pen& p) {
                       j["phase"] = phase_name(p.phase);
                       j["point"] = vec(p.point);
                       j["pressure"] = p.pressure;
                   },
                   [&](const ev::ThumbArc& p) { j["value"] = p.value; },
                   [&](const ev::LassoPoint& p) { j["point"] = vec(p.point); },
                   [&](const ev::LassoClose& p) { j["point"] = vec(p.point); },
                   [&](const ev::ToolglassPin& p) {
                       j["color"] = pin_color_name(p.color);
                       j["point"] = vec(p.point);
                       if (p.depth) j["depth"] = *p.depth;
                   },
                   [&](const ev::BookmarkCreate& p) { j["label"] = p.label; },
                   [&](const ev::BookmarkRecall& p) { j["id"] = p.id; },
                   [&](const ev::TourCreate& p) { j["ids"] = p.bookmark_ids, j["duration"] = p.duration; },
                   [&](const ev::LockOn& p) { j["trajectory"] = p.trajectory_id, j["point"] = vec(p.point); },
                   [&](const ev::TubeBegin& p) { j["radius"] = p.radius; },
                   [&](const ev::TubeRadius& p) { j["radius"] = p.radius; },
                   [&](const ev::SelectMode& p) { j["mode"] = p.intersect ? "intersect" : "replace"; },
                   [&](const auto&) {},
               },
               e.payload);
    return j;
}

InputEvent event_from_json(const json& j) {
    InputEvent e;
    const json& t = field(j, "t_ms");
    if (!t.is_number_integer()) throw InputError("field 't_ms' must be an integer");
    e.t_ms = t.get<std::int64_t>();
    const std::string name = str(j, "event");

    if (name == "POSE") {
        const auto p = reals(j, "position", 3);
        const auto q = reals(j, "orientation", 4);
        Pose pose{{p[0], p[1], p[2]}, {q[0], q[1], q[2], q[3]}};
        if (!(std::abs(pose.orientation.norm() - 1.0) < 1e-6))
            throw InputError("pose orientation is not a unit quaternion");
        e.payload = ev::PoseSample{pose};
    } else if (name == "CLUTCH_DOWN") {
        e.payload = ev::ClutchDown{};
    } else if (name == "CLUTCH_UP") {
        e.payload = ev::ClutchUp{};
    } else if (name == "PINCH_START" || name == "PINCH_UPDATE") {
        const double s = real(j, "scale");
        if (!(s > 0.0)) throw InputError("pinch scale must be > 0");
        if (name == "PINCH_START") e.payload = ev::PinchStart{vec2(j, "focus"), s};
        else e.payload = ev::PinchUpdate{vec2(j, "focus"), s};
    } else if (name == "PINCH_END") {
        e.payload = ev::PinchEnd{};
    } else if (name == "PAN") {
        e.payload = ev::PanUpdate{vec2(j, "delta")};
    } else if (name == "PEN") {
        const std::string ph = str(j, "phase");
        PenPhase phase;
        if (ph == "down") phase = PenPhase::Down;
        else if (ph == "move") phase = PenPhase::Move;
        else if (ph == "up") phase = PenPhase::Up;
        else throw InputError("unknown pen phase '" + ph + "'");
        e.payload = ev::Pen{phase, vec2(j, "point"), j.contains("pressure") ? real(j, "pressure") : 1.0};
    } else if (name == "THUMB_ARC") {
        e.payload = ev::ThumbArc{real(j, "value")};
    } else if (name == "LASSO_POINT") {
        e.payload = ev::LassoPoint{vec2(j, "point")};
    } else if (name == "LASSO_CLOSE") {
        e.payload = ev::LassoClose{vec2(j, "point")};
    } else if (name == "PIN") {
        ev::ToolglassPin p{parse_pin_color(str(j, "color")), vec2(j, "point"), std::nullopt};
        if (j.contains("depth")) p.depth = real(j, "depth");
        e.payload = p;
    } else if (name == "BOOKMARK") {
        e.payload = ev::BookmarkCreate{j.contains("label") ? str(j, "label") : std::string{}};
    } else if (name == "RECALL") {
        e.payload = ev::BookmarkRecall{uint(field(j, "id"), "id")};
    } else if (name == "TOUR") {
        ev::TourCreate c;
        const json& ids = field(j, "ids");
        if (!ids.is_array()) throw InputError("field 'ids' must be an array");
        for (const auto& id : ids) c.bookmark_ids.push_back(uint(id, "ids"));
        c.duration = j.contains("duration") ? real(j, "duration") : 2.0;
        e.payload = c;
    } else if (name == "RECORD_START") {
        e.payload = ev::RecordStart{};
    } else if (name == "RECORD_STOP") {
        e.payload = ev::RecordStop{};
    } else if (name == "LOCK_ON") {
        e.payload = ev::LockOn{str(j, "trajectory"), vec2(j, "point")};
    } else if (name == "UNLOCK") {
        e.payload = ev::Unlock{};
    } else if (name == "TUBE_BEGIN") {
        e.payload = ev::TubeBegin{real(j, "radius")};
    } else if (name == "TUBE_END") {
        e.payload = ev::TubeEnd{};
    } else if (name == "TUBE_RADIUS") {
        e.payload = ev::TubeRadius{real(j, "radius")};
    } else if (name == "SELECT_MODE") {
        const std::string m = str(j, "mode");
        if (m != "intersect" && m != "replace") throw InputError("select mode must be intersect or replace");
        e.payload = ev::SelectMode{m == "intersect"};
    } else if (name == "SELECT_CLEAR") {
        e.payload = ev::SelectClear{};
    } else {
        throw InputError("unknown event '" + name + "'");
    }
    return e;
}

std::string base64_encode(std::string_view in) {
    static constexpr char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        const unsigned v = unsigned(std::uint8_t(in[i])) << 16 | unsigned(std::uint8_t(in[i + 1])) << 8 |
                           unsigned(std::uint8_t(in[i + 2]));
        out += tbl[v >> 18 & 63];
        out += tbl[v >> 12 & 63];
        out += tbl[v >> 6 & 63];
        out += tbl[v & 63];
    }
    if (i < in.size()) {
        unsigned v = unsigned(std::uint8_t(in[i])) << 16;
        if (i + 1 < in.size()) v |= unsigned(std::uint8_t(in[i + 1])) << 8;
        out += tbl[v >> 18 & 63];
        out += tbl[v >> 12 & 63];
        out += i + 1 < in.size() ? tbl[v >> 6 & 63] : '=';
        out += '=';
    }
    return out;
}

WireSession::WireSession(std::shared_ptr<const Dataset> dataset, EngineConfig cfg)
    : engine_(std::move(dataset), std::move(cfg)) {}

json WireSession::render_state() const {
    const Engine& en = engine_;
    json overlays = json::array();
    for (const auto& [id, pin] : en.store().pins())
        overlays.push_back({{"kind", "pin"}, {"id", id}, {"color", pin_color_name(pin.color)},
                            {"position", vec(pin.position)}});
    const RenderOverlays o = en.overlays();
    for (const auto& s : o.screen_strokes) {
        json pts = json::array();
        for (auto p : s) pts.push_back(vec(p));
        overlays.push_back({{"kind", "stroke"}, {"anchor", "viewplane"}, {"points", pts}});
    }
    for (const auto& s : o.world_strokes) {
        json pts = json::array();
        for (auto p : s) pts.push_back(vec(p));
        overlays.push_back({{"kind", "stroke"}, {"anchor", "world"}, {"points", pts}});
    }
    if (!o.lasso.empty()) {
        json pts = json::array();
        for (auto p : o.lasso) pts.push_back(vec(p));
        overlays.push_back({{"kind", "lasso"}, {"points", pts}});
    }
    if (!o.tube.empty()) {
        json pts = json::array();
        for (auto p : o.tube) pts.push_back(vec(p));
        overlays.push_back({{"kind", "tube"}, {"points", pts}});
    }
    for (const auto& [id, b] : en.store().bookmarks())
        overlays.push_back({{"kind", "bookmark"}, {"id", id}, {"label", b.label},
                            {"position", vec(b.device_pose.position)}});

    const auto& st = en.state();
    return {{"type", "render_state"},
            {"view", mat(en.view().clip)},
            {"mode", mode_name(st.mode)},
            {"filter", st.filter_value},
            {"locked", st.lock ? json(st.lock->trajectory_id) : json(nullptr)},
            {"visible", en.visible_ids()},
            {"selected", en.selection().ids()},
            {"overlays", overlays}};
}

json WireSession::query(const json& req) {
    const std::string what = str(req, "what");
    if (what == "render_state") return render_state();
    if (what == "bookmarks") {
        // All bookmarks by distance from the live device pose; `near` marks the
        // ones within the proximity radius and angle.
        const Pose here = engine_.state().current_device_pose;
        const auto& cfg = engine_.config().proximity;
        ProximityConfig all{std::numeric_limits<double>::infinity(), std::numbers::pi};
        json list = json::array();
        for (const auto& hit : nearby_bookmarks(engine_.store(), here, all)) {
            const Bookmark& b = *engine_.store().find_bookmark(hit.id);
            list.push_back({{"id", hit.id},
                            {"label", b.label},
                            {"distance", hit.distance},
                            {"angle", hit.angle},
                            {"near", hit.distance <= cfg.radius_m && hit.angle <= cfg.max_angle}});
        }
        return {{"type", "bookmarks"}, {"bookmarks", list}};
    }
    if (what == "selection") return {{"type", "selection"}, {"entries", selection_json(engine_.selection())}};
    if (what == "state_file") return {{"type", "state_file"}, {"text", format_state(engine_.snapshot())}};
    if (what == "effect_log") {
        json lines = json::array();
        for (const auto& e : engine_.effect_log()) lines.push_back(format_effect(e));
        return {{"type", "effect_log"}, {"lines", lines}};
    }
    if (what == "frame") {
        const Image img = engine_.render();
        return {{"type", "frame"}, {"width", img.width()}, {"height", img.height()},
                {"ppm_base64", base64_encode(to_ppm(img))}};
    }
    if (what == "tour_sample") {
        const std::uint64_t id = uint(field(req, "tour"), "tour");
        const auto it = engine_.tours().find(id);
        if (it == engine_.tours().end()) throw InputError("unknown tour " + std::to_string(id));
        const ViewSnapshot s = sample_tour(it->second, real(req, "t"));
        return {{"type", "tour_sample"},
                {"view", mat(snapshot_view(s, engine_.config().session.camera).clip)},
                {"filter", s.filter_value},
                {"duration", it->second.total_duration()}};
    }
    throw InputError("unknown query '" + what + "'");
}

WireReply WireSession::handle(std::string_view line) {
    WireReply reply;
    json req;
    try {
        req = json::parse(line);
    } catch (const json::exception& e) {
        reply.lines.push_back(error_reply(nullptr, std::string("malformed JSON: ") + e.what()).dump());
        return reply;
    }
    const json seq = req.is_object() && req.contains("seq") ? req["seq"] : json(nullptr);
    if (!req.is_object()) {
        reply.lines.push_back(error_reply(seq, "message must be a JSON object").dump());
        return reply;
    }
    if (req.contains("version") && req["version"] != kWireVersion) {
        reply.lines.push_back(error_reply(seq, "unsupported protocol version").dump());
        reply.close = true;
        return reply;
    }
    try {
        const std::string type = str(req, "type");
        json out;
        if (type == "hello") {
            out = {{"type", "hello"}, {"version", kWireVersion}, {"engine", "portalens"}};
        } else if (type == "event") {
            json fx = json::array();
            for (const auto& e : engine_.dispatch(event_from_json(req)))
                fx.push_back({{"t_ms", e.t_ms}, {"kind", e.kind}, {"detail", e.detail}});
            out = {{"type", "ack"}, {"effects", fx}};
        } else if (type == "query") {
            out = query(req);
        } else {
            throw InputError("unknown message type '" + type + "'");
        }
        out["seq"] = seq;
        reply.lines.push_back(out.dump());
    } catch (const std::exception& e) {
        reply.lines.push_back(error_reply(seq, e.what()).dump());
    }
    return reply;
}

} // namespace portalens
