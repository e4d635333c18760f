#include "portalens/io/trace.hpp"

#include "portalens/error.hpp"
#include "portalens/io/text.hpp"

#include <fstream>
#include <ostream>

namespace portalens {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

using text::to_real;

std::string_view phase_name(PenPhase p) {
    switch (p) {
    case PenPhase::Down: return "down";
    case PenPhase::Move: return "move";
    case PenPhase::Up: return "up";
    }
    return "down";
}

PenPhase parse_phase(std::string_view s) {
    if (s == "down") return PenPhase::Down;
    if (s == "move") return PenPhase::Move;
    if (s == "up") return PenPhase::Up;
    throw InputError("unknown pen phase '" + std::string(s) + "'");
}

class Fields {
public:
    explicit Fields(std::vector<std::string_view> f) : f_(std::move(f)) {}

    std::size_t size() const { return f_.size(); }
    void expect(std::size_t lo, std::size_t hi, std::string_view name) const {
        if (f_.size() < lo || f_.size() > hi)
            throw InputError(std::string(name) + ": expected " + std::to_string(lo) +
                             (lo == hi ? "" : "-" + std::to_string(hi)) + " fields, got " +
                             std::to_string(f_.size()));
    }
    std::string_view str(std::size_t i) const { return f_[i]; }
    double real(std::size_t i) const { return to_real(f_[i]); }
    Vec2 vec2(std::size_t i) const { return {real(i), real(i + 1)}; }

private:
    std::vector<std::string_view> f_;
};

struct Out {
    std::string s;
    Out& operator<<(std::string_view v) {
        s += '\t';
        s += v;
        return *this;
    }
    Out& operator<<(double v) { return *this << std::string_view(format_real(v)); }
    Out& operator<<(Vec2 v) { return *this << v.x << v.y; }
};

} // namespace

std::string_view event_name(const EventPayload& p) {
    static constexpr std::string_view names[] = {
        "POSE",         "CLUTCH_DOWN", "CLUTCH_UP",    "PINCH_START", "PINCH_UPDATE",
        "PINCH_END",    "PAN",         "PEN",          "THUMB_ARC",   "LASSO_POINT",
        "LASSO_CLOSE",  "PIN",         "BOOKMARK",     "RECALL",      "TOUR",
        "RECORD_START", "RECORD_STOP", "LOCK_ON",      "UNLOCK",      "TUBE_BEGIN",
        "TUBE_END",     "TUBE_RADIUS", "SELECT_MODE",  "SELECT_CLEAR"};
    static_assert(std::size(names) == std::variant_size_v<EventPayload>);
    return names[p.index()];
}

std::string format_event(const InputEvent& e) {
    Out o{std::to_string(e.t_ms)};
    o << event_name(e.payload);
    std::visit(overloaded{
                   [&](const ev::PoseSample& p) {
                       const auto& q = p.pose.orientation;
                       o << p.pose.position.x << p.pose.position.y << p.pose.position.z << q.w
                         << q.x << q.y << q.z;
                   },
                   [&](const ev::PinchStart& p) { o << p.focus << p.scale; },
                   [&](const ev::PinchUpdate& p) { o << p.focus << p.scale; },
                   [&](const ev::PanUpdate& p) { o << p.delta; },
                   [&](const ev::Pen& p) { o << phase_name(p.phase) << p.point << p.pressure; },
                   [&](const ev::ThumbArc& p) { o << p.value; },
                   [&](const ev::LassoPoint& p) { o << p.point; },
                   [&](const ev::LassoClose& p) { o << p.point; },
                   [&](const ev::ToolglassPin& p) {
                       o << pin_color_name(p.color) << p.point;
                       if (p.depth) o << *p.depth;
                   },
                   [&](const ev::BookmarkCreate& p) { o << std::string_view(text::escape(p.label)); },
                   [&](const ev::BookmarkRecall& p) { o << std::string_view(std::to_string(p.id)); },
                   [&](const ev::TourCreate& p) {
                       o << p.duration;
                       for (auto id : p.bookmark_ids) o << std::string_view(std::to_string(id));
                   },
                   [&](const ev::LockOn& p) { o << std::string_view(text::escape(p.trajectory_id)) << p.point; },
                   [&](const ev::TubeBegin& p) { o << p.radius; },
                   [&](const ev::TubeRadius& p) { o << p.radius; },
                   [&](const ev::SelectMode& p) { o << (p.intersect ? "intersect" : "replace"); },
                   [&](const auto&) {},
               },
               e.payload);
    return o.s;
}

InputEvent parse_event(std::string_view line) {
    auto parts = text::split(line);
    if (parts.size() < 2) throw InputError("expected t_ms and event name");
    InputEvent e;
    e.t_ms = text::to_int(parts[0]);
    const std::string_view name = parts[1];
    const Fields f({parts.begin() + 2, parts.end()});
    auto none = [&] { f.expect(0, 0, name); };

    if (name == "POSE") {
        f.expect(7, 7, name);
        Pose p{{f.real(0), f.real(1), f.real(2)}, {f.real(3), f.real(4), f.real(5), f.real(6)}};
        if (!(std::abs(p.orientation.norm() - 1.0) < 1e-6))
            throw InputError("pose orientation is not a unit quaternion");
        e.payload = ev::PoseSample{p};
    } else if (name == "CLUTCH_DOWN") {
        none();
        e.payload = ev::ClutchDown{};
    } else if (name == "CLUTCH_UP") {
        none();
        e.payload = ev::ClutchUp{};
    } else if (name == "PINCH_START" || name == "PINCH_UPDATE") {
        f.expect(3, 3, name);
        if (!(f.real(2) > 0.0)) throw InputError("pinch scale must be > 0");
        if (name == "PINCH_START") e.payload = ev::PinchStart{f.vec2(0), f.real(2)};
        else e.payload = ev::PinchUpdate{f.vec2(0), f.real(2)};
    } else if (name == "PINCH_END") {
        none();
        e.payload = ev::PinchEnd{};
    } else if (name == "PAN") {
        f.expect(2, 2, name);
        e.payload = ev::PanUpdate{f.vec2(0)};
    } else if (name == "PEN") {
        f.expect(4, 4, name);
        e.payload = ev::Pen{parse_phase(f.str(0)), f.vec2(1), f.real(3)};
    } else if (name == "THUMB_ARC") {
        f.expect(1, 1, name);
        e.payload = ev::ThumbArc{f.real(0)};
    } else if (name == "LASSO_POINT") {
        f.expect(2, 2, name);
        e.payload = ev::LassoPoint{f.vec2(0)};
    } else if (name == "LASSO_CLOSE") {
        f.expect(2, 2, name);
        e.payload = ev::LassoClose{f.vec2(0)};
    } else if (name == "PIN") {
        f.expect(3, 4, name);
        ev::ToolglassPin p{parse_pin_color(f.str(0)), f.vec2(1), std::nullopt};
        if (f.size() == 4) p.depth = f.real(3);
        e.payload = p;
    } else if (name == "BOOKMARK") {
        f.expect(0, 1, name);
        e.payload = ev::BookmarkCreate{f.size() ? text::unescape(f.str(0)) : std::string{}};
    } else if (name == "RECALL") {
        f.expect(1, 1, name);
        e.payload = ev::BookmarkRecall{text::to_uint(f.str(0))};
    } else if (name == "TOUR") {
        f.expect(2, std::size_t(-1), name);
        ev::TourCreate c{{}, f.real(0)};
        for (std::size_t i = 1; i < f.size(); ++i) c.bookmark_ids.push_back(text::to_uint(f.str(i)));
        e.payload = c;
    } else if (name == "RECORD_START") {
        none();
        e.payload = ev::RecordStart{};
    } else if (name == "RECORD_STOP") {
        none();
        e.payload = ev::RecordStop{};
    } else if (name == "LOCK_ON") {
        f.expect(3, 3, name);
        e.payload = ev::LockOn{text::unescape(f.str(0)), f.vec2(1)};
    } else if (name == "UNLOCK") {
        none();
        e.payload = ev::Unlock{};
    } else if (name == "TUBE_BEGIN") {
        f.expect(1, 1, name);
        e.payload = ev::TubeBegin{f.real(0)};
    } else if (name == "TUBE_END") {
        none();
        e.payload = ev::TubeEnd{};
    } else if (name == "TUBE_RADIUS") {
        f.expect(1, 1, name);
        e.payload = ev::TubeRadius{f.real(0)};
    } else if (name == "SELECT_MODE") {
        f.expect(1, 1, name);
        if (f.str(0) != "intersect" && f.str(0) != "replace")
            throw InputError("select mode must be intersect or replace");
        e.payload = ev::SelectMode{f.str(0) == "intersect"};
    } else if (name == "SELECT_CLEAR") {
        none();
        e.payload = ev::SelectClear{};
    } else {
        throw InputError("unknown event '" + std::string(name) + "'");
    }
    return e;
}

std::vector<InputEvent> read_trace(std::istream& in) {
    std::string line;
    if (!text::next_line(in, line) || line != kTraceHeader)
        throw ParseError(1, "expected header '" + std::string(kTraceHeader) + "'");
    std::vector<InputEvent> events;
    std::size_t lineno = 1;
    while (text::next_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            InputEvent e = parse_event(line);
            if (!events.empty() && e.t_ms < events.back().t_ms)
                throw InputError("timestamp " + std::to_string(e.t_ms) + " before " +
                                 std::to_string(events.back().t_ms));
            events.push_back(std::move(e));
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& err) {
            throw ParseError(lineno, err.what());
        }
    }
    return events;
}

std::vector<InputEvent> read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open trace '" + path + "'");
    return read_trace(in);
}

void write_trace(std::ostream& out, const std::vector<InputEvent>& events) {
    out << kTraceHeader << '\n';
    for (const auto& e : events) out << format_event(e) << '\n';
}

} // namespace portalens
