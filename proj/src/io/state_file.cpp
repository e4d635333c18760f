#include "portalens/io/state_file.hpp"

#include "portalens/error.hpp"
#include "portalens/io/text.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace portalens {

namespace {

// ── writing ─────────────────────────────────────────────────────

struct Line {
    std::string s;

    Line& operator<<(std::string_view v) {
        if (!s.empty()) s += '\t';
        s += v;
        return *this;
    }
    Line& operator<<(double v) { return *this << std::string_view(format_real(v)); }
    Line& operator<<(std::uint64_t v) { return *this << std::string_view(std::to_string(v)); }
    Line& operator<<(std::int64_t v) { return *this << std::string_view(std::to_string(v)); }
    Line& operator<<(Vec2 v) { return *this << v.x << v.y; }
    Line& operator<<(Vec3 v) { return *this << v.x << v.y << v.z; }
    Line& operator<<(const Pose& p) {
        const auto& q = p.orientation;
        return *this << p.position << q.w << q.x << q.y << q.z;
    }
    Line& operator<<(const AnchorFrame& a) { return *this << a.pose << a.scale; }
    Line& operator<<(const ViewSnapshot& v) {
        return *this << v.device_pose << v.anchor << v.pinch_zoom << v.pan_offset << v.filter_value;
    }
};

std::string id_list(const std::vector<std::uint64_t>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (auto id : ids) {
        if (!out.empty()) out += ',';
        out += std::to_string(id);
    }
    return out;
}

std::string_view event_kind_name(TourEventKind k) {
    switch (k) {
    case TourEventKind::Stroke: return "stroke";
    case TourEventKind::Audio: return "audio";
    case TourEventKind::Label: return "label";
    }
    return "label";
}

// ── reading ─────────────────────────────────────────────────────

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::size_t lineno() const { return lineno_; }

    /// Next line split into fields; throws at end of input.
    const std::vector<std::string_view>& next(std::string_view what) {
        if (!text::next_line(in_, line_)) throw ParseError(lineno_ + 1, "unexpected end of file, expected " + std::string(what));
        ++lineno_;
        fields_ = text::split(line_);
        pos_ = 0;
        return fields_;
    }

    /// Next line must start with `key`; returns the remaining field count.
    std::size_t keyed(std::string_view key) {
        next(key);
        if (fields_[0] != key) fail("expected '" + std::string(key) + "'");
        pos_ = 1;
        return fields_.size() - 1;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno_, msg); }

    void need(std::size_t n) const {
        if (fields_.size() - pos_ < n) fail("too few fields");
    }
    void done() const {
        if (pos_ != fields_.size()) fail("unexpected extra fields");
    }

    std::string_view str() {
        need(1);
        return fields_[pos_++];
    }
    double real() { return wrap([&] { return text::to_real(str()); }); }
    std::uint64_t uint() { return wrap([&] { return text::to_uint(str()); }); }
    std::int64_t integer() { return wrap([&] { return text::to_int(str()); }); }
    Vec2 vec2() { const double x = real(); return {x, real()}; }
    Vec3 vec3() {
        const double x = real(), y = real();
        return {x, y, real()};
    }
    Pose pose() {
        const Vec3 p = vec3();
        const double w = real(), x = real(), y = real();
        return {p, {w, x, y, real()}};
    }
    AnchorFrame anchor() {
        const Pose p = pose();
        const double s = real();
        if (!(s > 0.0)) fail("anchor scale must be > 0");
        return {p, s};
    }
    ViewSnapshot snapshot() {
        ViewSnapshot v;
        v.device_pose = pose();
        v.anchor = anchor();
        v.pinch_zoom = real();
        v.pan_offset = vec2();
        v.filter_value = real();
        return v;
    }
    std::vector<std::uint64_t> id_list() {
        const std::string_view s = str();
        std::vector<std::uint64_t> ids;
        if (s == "-") return ids;
        for (auto part : text::split(s, ',')) ids.push_back(wrap([&] { return text::to_uint(part); }));
        return ids;
    }

    template <class F>
    auto wrap(F f) -> decltype(f()) {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            fail(e.what());
        }
    }

private:
    std::istream& in_;
    std::string line_;
    std::vector<std::string_view> fields_;
    std::size_t pos_ = 0;
    std::size_t lineno_ = 0;
};

} // namespace

void write_state(std::ostream& out, const SessionSnapshot& snap) {
    auto emit = [&](const Line& l) { out << l.s << '\n'; };
    const PortalState& st = snap.state;
    out << kStateHeader << '\n';
    out << "SESSION\n";
    emit(Line{} << "mode" << mode_name(st.mode));
    emit(Line{} << "anchor" << st.anchor);
    emit(Line{} << "frozen_pose" << st.frozen_device_pose);
    emit(Line{} << "current_pose" << st.current_device_pose);
    emit(Line{} << "pinch_zoom" << st.pinch_zoom);
    emit(Line{} << "pan" << st.pan_offset);
    emit(Line{} << "filter" << st.filter_value);
    emit(Line{} << "clock" << st.last_t_ms << std::string_view(st.started ? "1" : "0"));
    if (snap.lock)
        emit(Line{} << "lock" << std::string_view(text::escape(snap.lock->trajectory_id))
                    << snap.lock->arc_length << snap.lock->gain);
    else
        emit(Line{} << "lock" << "-");

    const auto& store = snap.store;
    emit(Line{} << "BOOKMARKS" << std::uint64_t(store.bookmarks().size()));
    for (const auto& [id, b] : store.bookmarks())
        emit(Line{} << b.id << b.created_at << b.device_pose << b.anchor << b.pinch_zoom
                    << b.pan_offset << b.filter_value << std::string_view(id_list(b.stroke_ids))
                    << std::string_view(text::escape(b.label)));

    emit(Line{} << "PINS" << std::uint64_t(store.pins().size()));
    for (const auto& [id, p] : store.pins())
        emit(Line{} << p.id << pin_color_name(p.color) << p.position);

    emit(Line{} << "STROKES" << std::uint64_t(store.strokes().size()));
    for (const auto& [id, s] : store.strokes()) {
        emit(Line{} << s.id << std::string_view(s.anchor == StrokeAnchor::World ? "world" : "viewplane")
                    << std::uint64_t(s.points.size()));
        for (const auto& p : s.points) emit(Line{} << "P" << p.t_ms << p.point << p.pressure);
    }

    emit(Line{} << "TOURS" << std::uint64_t(snap.tours.size()));
    for (const auto& [id, t] : snap.tours) {
        emit(Line{} << t.id << std::uint64_t(t.keyframes.size()) << std::uint64_t(t.events.size()));
        for (const auto& k : t.keyframes)
            emit(Line{} << "K"
                        << std::string_view(k.bookmark_id ? std::to_string(*k.bookmark_id) : "-")
                        << k.segment_duration << std::string_view(k.ease ? "1" : "0") << k.snapshot);
        for (const auto& e : t.events)
            emit(Line{} << "E" << e.t_offset << event_kind_name(e.kind) << e.stroke_id << e.audio_offset
                        << std::string_view(text::escape(e.text)));
    }
    out << "END\n";
}

std::string format_state(const SessionSnapshot& s) {
    std::ostringstream os;
    write_state(os, s);
    return os.str();
}

SessionSnapshot read_state(std::istream& in, const Dataset* ds) {
    Reader r(in);
    SessionSnapshot snap;
    {
        const auto& f = r.next("header");
        if (f.size() != 1 || f[0] != kStateHeader)
            r.fail("expected header '" + std::string(kStateHeader) + "'");
    }
    r.keyed("SESSION");
    r.done();

    PortalState& st = snap.state;
    r.keyed("mode");
    {
        const auto m = r.str();
        if (m == "explore") st.mode = Mode::Explore;
        else if (m == "clutched") st.mode = Mode::Clutched;
        else r.fail("unknown mode '" + std::string(m) + "'");
        r.done();
    }
    r.keyed("anchor"), st.anchor = r.anchor(), r.done();
    r.keyed("frozen_pose"), st.frozen_device_pose = r.pose(), r.done();
    r.keyed("current_pose"), st.current_device_pose = r.pose(), r.done();
    r.keyed("pinch_zoom"), st.pinch_zoom = r.real(), r.done();
    if (!(st.pinch_zoom > 0.0)) r.fail("pinch_zoom must be > 0");
    r.keyed("pan"), st.pan_offset = r.vec2(), r.done();
    r.keyed("filter"), st.filter_value = r.real(), r.done();
    if (!(st.filter_value >= 0.0 && st.filter_value <= 1.0)) r.fail("filter must lie in [0, 1]");
    r.keyed("clock");
    st.last_t_ms = r.integer();
    {
        const auto s = r.str();
        if (s != "0" && s != "1") r.fail("started flag must be 0 or 1");
        st.started = s == "1";
    }
    r.done();
    r.keyed("lock");
    {
        const auto id = r.str();
        if (id != "-") {
            LockRecord rec{r.wrap([&] { return text::unescape(id); }), 0.0, 1.0};
            rec.arc_length = r.real();
            rec.gain = r.real();
            snap.lock = rec;
        }
        r.done();
    }
    if (snap.lock && ds) {
        const auto idx = ds->find(snap.lock->trajectory_id);
        if (idx < 0) r.fail("locked trajectory '" + snap.lock->trajectory_id + "' not in dataset");
        std::vector<Vec3> path;
        for (std::size_t g = ds->first_sample(std::size_t(idx)); g < ds->end_sample(std::size_t(idx)); ++g)
            path.push_back(ds->position(g));
        st.lock = make_path_lock(snap.lock->trajectory_id, std::move(path), snap.lock->arc_length,
                                 snap.lock->gain);
    }

    AnnotationStore& store = snap.store;
    r.keyed("BOOKMARKS");
    const std::uint64_t nb = r.uint();
    r.done();
    for (std::uint64_t i = 0; i < nb; ++i) {
        r.next("bookmark");
        Bookmark b;
        b.id = r.uint();
        b.created_at = r.integer();
        b.device_pose = r.pose();
        b.anchor = r.anchor();
        b.pinch_zoom = r.real();
        b.pan_offset = r.vec2();
        b.filter_value = r.real();
        b.stroke_ids = r.id_list();
        b.label = r.wrap([&] { return text::unescape(r.str()); });
        r.done();
        if (store.find_bookmark(b.id)) r.fail("duplicate bookmark id");
        store.restore(std::move(b));
    }

    r.keyed("PINS");
    const std::uint64_t np = r.uint();
    r.done();
    for (std::uint64_t i = 0; i < np; ++i) {
        r.next("pin");
        Pin p;
        p.id = r.uint();
        p.color = r.wrap([&] { return parse_pin_color(r.str()); });
        p.position = r.vec3();
        r.done();
        if (store.pins().count(p.id)) r.fail("duplicate pin id");
        store.restore(p);
    }

    r.keyed("STROKES");
    const std::uint64_t ns = r.uint();
    r.done();
    for (std::uint64_t i = 0; i < ns; ++i) {
        r.next("stroke");
        InkStroke s;
        s.id = r.uint();
        const auto anchor = r.str();
        if (anchor == "world") s.anchor = StrokeAnchor::World;
        else if (anchor == "viewplane") s.anchor = StrokeAnchor::ViewPlane;
        else r.fail("unknown stroke anchor '" + std::string(anchor) + "'");
        const std::uint64_t n = r.uint();
        r.done();
        for (std::uint64_t k = 0; k < n; ++k) {
            r.keyed("P");
            StrokePoint p;
            p.t_ms = r.integer();
            p.point = r.vec3();
            p.pressure = r.real();
            r.done();
            s.points.push_back(p);
        }
        if (store.find_stroke(s.id)) r.fail("duplicate stroke id");
        store.restore(std::move(s));
    }
    for (const auto& [id, b] : store.bookmarks())
        for (auto sid : b.stroke_ids)
            if (!store.find_stroke(sid))
                r.fail("bookmark " + std::to_string(id) + " references unknown stroke " + std::to_string(sid));

    r.keyed("TOURS");
    const std::uint64_t nt = r.uint();
    r.done();
    for (std::uint64_t i = 0; i < nt; ++i) {
        r.next("tour");
        Tour t;
        t.id = r.uint();
        const std::uint64_t nk = r.uint(), ne = r.uint();
        r.done();
        for (std::uint64_t k = 0; k < nk; ++k) {
            r.keyed("K");
            TourKeyframe kf;
            const auto bid = r.str();
            if (bid != "-") kf.bookmark_id = r.wrap([&] { return text::to_uint(bid); });
            kf.segment_duration = r.real();
            const auto ease = r.str();
            if (ease != "0" && ease != "1") r.fail("ease flag must be 0 or 1");
            kf.ease = ease == "1";
            kf.snapshot = r.snapshot();
            r.done();
            t.keyframes.push_back(kf);
        }
        for (std::uint64_t k = 0; k < ne; ++k) {
            r.keyed("E");
            TourEvent e;
            e.t_offset = r.real();
            const auto kind = r.str();
            if (kind == "stroke") e.kind = TourEventKind::Stroke;
            else if (kind == "audio") e.kind = TourEventKind::Audio;
            else if (kind == "label") e.kind = TourEventKind::Label;
            else r.fail("unknown tour event kind '" + std::string(kind) + "'");
            e.stroke_id = r.uint();
            e.audio_offset = r.real();
            e.text = r.wrap([&] { return text::unescape(r.str()); });
            r.done();
            t.events.push_back(std::move(e));
        }
        r.wrap([&] { validate(t, &store); return 0; });
        if (snap.tours.count(t.id)) r.fail("duplicate tour id");
        snap.tours.emplace(t.id, std::move(t));
    }

    r.keyed("END");
    r.done();
    return snap;
}

SessionSnapshot read_state_file(const std::string& path, const Dataset* ds) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open state file '" + path + "'");
    return read_state(in, ds);
}

} // namespace portalens
