#include "portalens/selection.hpp"

#include "portalens/error.hpp"
#include "portalens/kernels.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace portalens {

// ── Volumes ─────────────────────────────────────────────────────

void validate(const LassoVolume& v) {
    std::vector<Vec2> distinct;
    for (const Vec2& p : v.polygon) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InputError("lasso vertex is not finite");
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    }
    if (distinct.size() < 3) throw InputError("lasso needs at least 3 distinct vertices");
    if (!(v.depth_near <= v.depth_far)) throw InputError("lasso depth range is empty");
}

LassoVolume make_lasso(std::vector<Vec2> polygon, const ViewTransform& view) {
    const double s = view.data_to_eye.scale;
    LassoVolume v{std::move(polygon), view, view.camera.near / s, view.camera.far / s};
    validate(v);
    return v;
}

bool polygon_contains(const std::vector<Vec2>& poly, Vec2 p) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        const double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (c == 0.0 && p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
            p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y))
            return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[i], b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            inside = !inside;
    }
    return inside;
}

namespace {

bool in_volume(const LassoVolume& v, Vec2 screen, double depth, double w) {
    return w > 0.0 && depth >= v.depth_near && depth <= v.depth_far &&
           polygon_contains(v.polygon, screen);
}

double axial_depth(const ViewTransform& view, Vec3 p) {
    return -view.data_to_eye.apply(p).z / view.data_to_eye.scale;
}

} // namespace

bool lasso_contains(const LassoVolume& v, Vec3 p) {
    const auto sp = project_point(v.view, p);
    if (!sp) return false;
    return sp->depth >= v.depth_near && sp->depth <= v.depth_far &&
           polygon_contains(v.polygon, sp->screen);
}

std::optional<Aabb> lasso_bounds(const LassoVolume& v) {
    double cube_far = 0.0;
    for (int c = 0; c < 8; ++c)
        cube_far = std::max(cube_far, axial_depth(v.view, {double(c & 1), double((c >> 1) & 1),
                                                           double((c >> 2) & 1)}));
    const double near = std::max(v.depth_near, 0.0);
    const double far = std::min(v.depth_far, cube_far);
    if (!(near <= far)) return std::nullopt;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Vec2& p : v.polygon) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    const double inf = std::numeric_limits<double>::infinity();
    Aabb box{{inf, inf, inf}, {-inf, -inf, -inf}};
    for (double sx : {x0, x1})
        for (double sy : {y0, y1})
            for (double d : {near, far}) {
                const Vec3 q = point_at_depth(v.view, {sx, sy}, d);
                box.lo = {std::min(box.lo.x, q.x), std::min(box.lo.y, q.y), std::min(box.lo.z, q.z)};
                box.hi = {std::max(box.hi.x, q.x), std::max(box.hi.y, q.y), std::max(box.hi.z, q.z)};
            }
    constexpr double pad = 1e-7;
    box.lo = {std::max(box.lo.x - pad, 0.0), std::max(box.lo.y - pad, 0.0),
              std::max(box.lo.z - pad, 0.0)};
    box.hi = {std::min(box.hi.x + pad, 1.0), std::min(box.hi.y + pad, 1.0),
              std::min(box.hi.z + pad, 1.0)};
    if (box.lo.x > box.hi.x || box.lo.y > box.hi.y || box.lo.z > box.hi.z) return std::nullopt;
    return box;
}

void validate(const TubeSelector& t) {
    if (t.control_points.size() < 2) throw InputError("tube needs at least 2 control points");
    if (!(t.radius > 0.0) || !std::isfinite(t.radius)) throw InputError("tube radius must be > 0");
    for (const Vec3& p : t.control_points)
        if (!is_finite(p)) throw InputError("tube control point is not finite");
}

TubeSelector edit_tube_point(const TubeSelector& t, std::size_t index, Vec3 position) {
    if (index >= t.control_points.size()) throw InputError("tube point index out of range");
    if (!is_finite(position)) throw InputError("tube control point is not finite");
    TubeSelector out = t;
    out.control_points[index] = position;
    return out;
}

TubeSelector edit_tube_radius(const TubeSelector& t, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("tube radius must be > 0");
    TubeSelector out = t;
    out.radius = radius;
    return out;
}

// ── Results ─────────────────────────────────────────────────────

std::vector<std::string> SelectionResult::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.id);
    return out;
}

SelectionResult make_selection(const Dataset& ds, const std::vector<std::vector<bool>>& matched) {
    SelectionResult r;
    for (std::size_t t = 0; t < matched.size(); ++t) {
        SelectionEntry e{ds.trajectory(t).id, {}};
        const auto& m = matched[t];
        for (std::uint32_t i = 0; i < m.size(); ++i) {
            if (!m[i]) continue;
            if (!e.ranges.empty() && e.ranges.back().last + 1 == i)
                e.ranges.back().last = i;
            else
                e.ranges.push_back({i, i});
        }
        if (!e.ranges.empty()) r.entries.push_back(std::move(e));
    }
    std::sort(r.entries.begin(), r.entries.end(),
              [](const SelectionEntry& a, const SelectionEntry& b) { return a.id < b.id; });
    return r;
}

void write_selection(std::ostream& out, const SelectionResult& r) {
    for (const auto& e : r.entries)
        for (const auto& range : e.ranges)
            out << e.id << '\t' << range.first << '\t' << range.last << '\n';
}

// ── Queries ─────────────────────────────────────────────────────

namespace {

std::vector<SegmentRef> all_segments(const Dataset& ds) {
    std::vector<SegmentRef> out;
    out.reserve(ds.segment_count());
    for (std::uint32_t t = 0; t < ds.trajectory_count(); ++t)
        for (std::uint32_t s = 0; s + 1 < ds.trajectory(t).samples.size(); ++s)
            out.push_back({t, s});
    return out;
}

std::vector<SegmentRef> candidates(const Dataset& ds, const std::optional<Aabb>& box,
                                   const SelectOptions& opt) {
    if (!opt.use_index) return all_segments(ds);
    if (!box) return {};
    return ds.query_candidates(*box);
}

/// Global indices of every endpoint of the given segments, ascending.
std::vector<std::size_t> endpoint_samples(const Dataset& ds, const std::vector<SegmentRef>& segs) {
    std::vector<std::size_t> out;
    out.reserve(segs.size() * 2);
    for (const SegmentRef& s : segs) {
        const std::size_t g = ds.first_sample(s.trajectory) + s.segment;
        out.push_back(g);
        out.push_back(g + 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct PointBuffer {
    std::vector<double> x, y, z;

    void reserve(std::size_t n) { x.reserve(n), y.reserve(n), z.reserve(n); }
    void push(Vec3 p) { x.push_back(p.x), y.push_back(p.y), z.push_back(p.z); }
    std::size_t size() const { return x.size(); }
    kernels::PointsSoA view() const { return {x, y, z}; }
};

struct ProjectionBuffer {
    std::vector<double> sx, sy, depth, w;

    explicit ProjectionBuffer(std::size_t n) : sx(n), sy(n), depth(n), w(n) {}
    kernels::ProjectedSoA view() { return {sx, sy, depth, w}; }
};

PointBuffer gather(const Dataset& ds, const std::vector<std::size_t>& samples) {
    PointBuffer b;
    b.reserve(samples.size());
    for (std::size_t g : samples) b.push(ds.position(g));
    return b;
}

std::vector<std::vector<bool>> empty_matches(const Dataset& ds) {
    std::vector<std::vector<bool>> m(ds.trajectory_count());
    for (std::size_t t = 0; t < m.size(); ++t) m[t].assign(ds.trajectory(t).samples.size(), false);
    return m;
}

/// trajectory index of a global sample, via binary search over offsets
std::size_t owner(const Dataset& ds, std::size_t g) {
    std::size_t lo = 0, hi = ds.trajectory_count();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (ds.first_sample(mid) <= g)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// Per-sample membership of `samples` in one volume.
std::vector<bool> samples_in_volume(const Dataset& ds, const LassoVolume& v,
                                    const std::vector<std::size_t>& samples, double filter) {
    const PointBuffer pts = gather(ds, samples);
    ProjectionBuffer proj(pts.size());
    kernels::project_points(v.view, pts.view(), proj.view());
    std::vector<bool> in(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        in[i] = time_visible(pts.y[i], filter) &&
                in_volume(v, {proj.sx[i], proj.sy[i]}, proj.depth[i], proj.w[i]);
    return in;
}

} // namespace

SelectionResult lasso_select(const Dataset& ds, const LassoVolume& volume, const SelectOptions& opt) {
    validate(volume);
    if (opt.subdivisions < 1) throw InputError("subdivisions must be >= 1");
    const auto segs = candidates(ds, lasso_bounds(volume), opt);
    auto matched = empty_matches(ds);

    const auto samples = endpoint_samples(ds, segs);
    const auto in = samples_in_volume(ds, volume, samples, opt.filter_value);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!in[i]) continue;
        const std::size_t t = owner(ds, samples[i]);
        matched[t][samples[i] - ds.first_sample(t)] = true;
    }

    // Interior segment points, k = 1 .. n-1 at step 1/n.
    const int n = opt.subdivisions;
    PointBuffer pts;
    pts.reserve(segs.size() * std::size_t(n - 1));
    for (const SegmentRef& s : segs) {
        const Vec3 a = ds.position(s.trajectory, s.segment);
        const Vec3 b = ds.position(s.trajectory, s.segment + 1);
        for (int k = 1; k < n; ++k) {
            const double u = double(k) / double(n);
            pts.push(a + u * (b - a));
        }
    }
    ProjectionBuffer proj(pts.size());
    kernels::project_points(volume.view, pts.view(), proj.view());
    for (std::size_t si = 0; si < segs.size(); ++si) {
        auto& m = matched[segs[si].trajectory];
        const std::size_t seg = segs[si].segment;
        if (m[seg] && m[seg + 1]) continue;
        for (int k = 1; k < n; ++k) {
            const std::size_t i = si * std::size_t(n - 1) + std::size_t(k - 1);
            if (time_visible(pts.y[i], opt.filter_value) &&
                in_volume(volume, {proj.sx[i], proj.sy[i]}, proj.depth[i], proj.w[i])) {
                m[seg] = true;
                m[seg + 1] = true;
                break;
            }
        }
    }
    return make_selection(ds, matched);
}

SelectionResult intersect_select(const Dataset& ds, const std::vector<LassoVolume>& volumes,
                                 const SelectOptions& opt) {
    if (volumes.empty()) throw InputError("intersect_select needs at least one volume");
    for (const auto& v : volumes) validate(v);
    auto matched = empty_matches(ds);

    if (opt.intersect_mode == IntersectMode::PerSample) {
        std::optional<Aabb> box = lasso_bounds(volumes.front());
        for (std::size_t i = 1; i < volumes.size() && box; ++i) {
            const auto b = lasso_bounds(volumes[i]);
            if (!b || !box->overlaps(*b)) {
                box.reset();
                break;
            }
            box = Aabb{{std::max(box->lo.x, b->lo.x), std::max(box->lo.y, b->lo.y),
                        std::max(box->lo.z, b->lo.z)},
                       {std::min(box->hi.x, b->hi.x), std::min(box->hi.y, b->hi.y),
                        std::min(box->hi.z, b->hi.z)}};
        }
        const auto samples = endpoint_samples(ds, candidates(ds, box, opt));
        std::vector<bool> all(samples.size(), true);
        for (const auto& v : volumes) {
            const auto in = samples_in_volume(ds, v, samples, opt.filter_value);
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = all[i] && in[i];
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!all[i]) continue;
            const std::size_t t = owner(ds, samples[i]);
            matched[t][samples[i] - ds.first_sample(t)] = true;
        }
        return make_selection(ds, matched);
    }

    std::vector<std::size_t> hits(ds.trajectory_count(), 0);
    for (const auto& v : volumes) {
        const auto samples = endpoint_samples(ds, candidates(ds, lasso_bounds(v), opt));
        const auto in = samples_in_volume(ds, v, samples, opt.filter_value);
        std::vector<bool> hit_this(ds.trajectory_count(), false);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!in[i]) continue;
            const std::size_t t = owner(ds, samples[i]);
            matched[t][samples[i] - ds.first_sample(t)] = true;
            hit_this[t] = true;
        }
        for (std::size_t t = 0; t < hits.size(); ++t) hits[t] += hit_this[t];
    }
    for (std::size_t t = 0; t < hits.size(); ++t)
        if (hits[t] != volumes.size()) matched[t].assign(matched[t].size(), false);
    return make_selection(ds, matched);
}

SelectionResult tube_select(const Dataset& ds, const TubeSelector& tube, const SelectOptions& opt) {
    validate(tube);
    Aabb box{tube.control_points.front(), tube.control_points.front()};
    for (const Vec3& p : tube.control_points) {
        box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
        box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
    }
    const double pad = tube.radius + 1e-9;
    box.lo = box.lo - Vec3{pad, pad, pad};
    box.hi = box.hi + Vec3{pad, pad, pad};

    const auto samples = endpoint_samples(ds, candidates(ds, box, opt));
    const PointBuffer pts = gather(ds, samples);
    std::vector<double> dist(pts.size());
    kernels::polyline_distance(pts.view(), tube.control_points, dist);

    auto matched = empty_matches(ds);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(dist[i] <= tube.radius) || !time_visible(pts.y[i], opt.filter_value)) continue;
        const std::size_t t = owner(ds, samples[i]);
        matched[t][samples[i] - ds.first_sample(t)] = true;
    }
    return make_selection(ds, matched);
}

} // namespace portalens
