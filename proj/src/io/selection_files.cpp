#include "portalens/io/selection_files.hpp"

#include "portalens/error.hpp"
#include "portalens/io/text.hpp"

#include <istream>

namespace portalens {

namespace {

struct LineReader {
    std::istream& in;
    std::size_t lineno = 0;
    std::string line;

    // Skips blank lines; false at end of input.
    bool next() {
        while (text::next_line(in, line)) {
            ++lineno;
            if (!line.empty()) return true;
        }
        return false;
    }

    template <class F>
    auto parse(F f) -> decltype(f()) {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw ParseError(lineno, e.what());
        }
    }
};

std::vector<double> reals(const std::vector<std::string_view>& f, std::size_t from, std::size_t n) {
    if (f.size() < from + n) throw InputError("too few fields");
    std::vector<double> out;
    for (std::size_t i = from; i < from + n; ++i) out.push_back(text::to_real(f[i]));
    return out;
}

void expect_header(LineReader& r, std::string_view header) {
    if (!text::next_line(r.in, r.line) || r.line != header)
        throw ParseError(1, "expected header '" + std::string(header) + "'");
    r.lineno = 1;
}

} // namespace

TubeSelector read_tube(std::istream& in) {
    LineReader r{in, 0, {}};
    expect_header(r, "PORTALENS-TUBE v1");
    TubeSelector tube;
    if (!r.next()) throw ParseError(r.lineno + 1, "missing radius line");
    r.parse([&] {
        const auto f = text::split(r.line);
        if (f.size() != 2 || f[0] != "radius") throw InputError("expected 'radius<TAB>r'");
        tube.radius = text::to_real(f[1]);
        return 0;
    });
    while (r.next())
        r.parse([&] {
            const auto f = text::split(r.line);
            if (f.size() != 3) throw InputError("expected x, y, z");
            const auto v = reals(f, 0, 3);
            tube.control_points.push_back({v[0], v[1], v[2]});
            return 0;
        });
    r.parse([&] { validate(tube); return 0; });
    return tube;
}

std::vector<LassoVolume> read_lassos(std::istream& in) {
    LineReader r{in, 0, {}};
    expect_header(r, "PORTALENS-LASSOS v1");
    CameraParams cam;
    std::vector<LassoVolume> out;
    bool first = true;
    while (r.next()) {
        const auto f = text::split(r.line);
        if (first && f[0] == "camera") {
            r.parse([&] {
                if (f.size() != 6) throw InputError("expected camera fov near far width height");
                const auto v = reals(f, 1, 3);
                cam = {v[0], v[1], v[2], int(text::to_int(f[4])), int(text::to_int(f[5]))};
                cam.validate();
                return 0;
            });
            first = false;
            continue;
        }
        first = false;
        if (f[0] != "LASSO") throw ParseError(r.lineno, "expected LASSO block");
        const std::size_t head = r.lineno;
        const auto [view, n] = r.parse([&] {
            if (f.size() != 17) throw InputError("expected LASSO, 7 pose, 8 anchor fields and a count");
            const auto v = reals(f, 1, 15);
            const Pose device{{v[0], v[1], v[2]}, Quat{v[3], v[4], v[5], v[6]}.normalized()};
            const AnchorFrame anchor{{{v[7], v[8], v[9]}, Quat{v[10], v[11], v[12], v[13]}.normalized()}, v[14]};
            if (!(anchor.scale > 0.0)) throw InputError("anchor scale must be > 0");
            return std::pair{view_from_pose(device, anchor, cam), text::to_uint(f[16])};
        });
        std::vector<Vec2> polygon;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (!r.next()) throw ParseError(r.lineno + 1, "lasso ends early");
            r.parse([&] {
                const auto g = text::split(r.line);
                if (g.size() != 2) throw InputError("expected x, y");
                const auto v = reals(g, 0, 2);
                polygon.push_back({v[0], v[1]});
                return 0;
            });
        }
        try {
            out.push_back(make_lasso(std::move(polygon), view));
        } catch (const InputError& e) {
            throw ParseError(head, e.what());
        }
    }
    if (out.empty()) throw InputError("no LASSO blocks");
    return out;
}

} // namespace portalens
