#include "portalens/dataset.hpp"

#include "portalens/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <unordered_map>

namespace portalens {

Dataset::Dataset(std::vector<Trajectory> trajectories, int grid_cells)
    : trajectories_(std::move(trajectories)), cells_(grid_cells) {
    if (cells_ < 1) throw InputError("grid cell count must be >= 1");

    std::size_t total = 0;
    for (const auto& t : trajectories_) total += t.samples.size();

    if (total > 0) {
        const double inf = std::numeric_limits<double>::infinity();
        Extent ex{inf, -inf}, ey{inf, -inf}, et{inf, -inf};
        for (const auto& t : trajectories_)
            for (const auto& s : t.samples) {
                ex.min = std::min(ex.min, s.x), ex.max = std::max(ex.max, s.x);
                ey.min = std::min(ey.min, s.y), ey.max = std::max(ey.max, s.y);
                et.min = std::min(et.min, s.t), et.max = std::max(et.max, s.t);
            }
        extents_[int(Axis::X)] = ex;
        extents_[int(Axis::Y)] = ey;
        extents_[int(Axis::T)] = et;
    }

    offsets_.reserve(trajectories_.size() + 1);
    xs_.reserve(total), ys_.reserve(total), zs_.reserve(total);
    offsets_.push_back(0);
    for (const auto& t : trajectories_) {
        for (const auto& s : t.samples) {
            xs_.push_back(extent(Axis::X).normalize(s.x));
            ys_.push_back(extent(Axis::T).normalize(s.t));
            zs_.push_back(extent(Axis::Y).normalize(s.y));
        }
        offsets_.push_back(xs_.size());
    }

    grid_.resize(std::size_t(cells_) * cells_ * cells_);
    for (std::uint32_t ti = 0; ti < trajectories_.size(); ++ti) {
        const std::size_t n = trajectories_[ti].samples.size();
        for (std::uint32_t si = 0; si + 1 < n; ++si) {
            const SegmentRef ref{ti, si};
            const Aabb b = segment_bounds(ref);
            for (int i = cell_coord(b.lo.x); i <= cell_coord(b.hi.x); ++i)
                for (int j = cell_coord(b.lo.y); j <= cell_coord(b.hi.y); ++j)
                    for (int k = cell_coord(b.lo.z); k <= cell_coord(b.hi.z); ++k)
                        grid_[cell_index(i, j, k)].push_back(ref);
        }
    }
}

std::size_t Dataset::segment_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories_) n += t.samples.size() - 1;
    return n;
}

int Dataset::cell_coord(double v) const {
    const double c = std::floor(v * cells_);
    if (!(c >= 0.0)) return 0;
    if (c >= cells_) return cells_ - 1;
    return int(c);
}

std::ptrdiff_t Dataset::find(const std::string& id) const {
    for (std::size_t i = 0; i < trajectories_.size(); ++i)
        if (trajectories_[i].id == id) return std::ptrdiff_t(i);
    return -1;
}

Aabb Dataset::segment_bounds(SegmentRef s) const {
    const Vec3 a = position(s.trajectory, s.segment);
    const Vec3 b = position(s.trajectory, s.segment + 1);
    return {{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)},
            {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}};
}

std::vector<SegmentRef> Dataset::query_candidates(const Aabb& box) const {
    std::vector<SegmentRef> out;
    const Aabb cube{{0, 0, 0}, {1, 1, 1}};
    if (!box.overlaps(cube)) return out;
    for (int i = cell_coord(box.lo.x); i <= cell_coord(box.hi.x); ++i)
        for (int j = cell_coord(box.lo.y); j <= cell_coord(box.hi.y); ++j)
            for (int k = cell_coord(box.lo.z); k <= cell_coord(box.hi.z); ++k) {
                const auto& cell = grid_[cell_index(i, j, k)];
                out.insert(out.end(), cell.begin(), cell.end());
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ── CSV ingestion ───────────────────────────────────────────────

namespace {

double parse_real(std::string_view field, std::size_t line, const char* name) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        throw ParseError(line, std::string("bad ") + name + " value '" + std::string(field) + "'");
    return v;
}

} // namespace

Dataset load_trajectories(std::istream& in, LoadReport* report, int grid_cells) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw InputError("empty file");
    if (line != "traj_id,x,y,t")
        throw ParseError(lineno, "expected header 'traj_id,x,y,t'");

    std::vector<Trajectory> trajs;
    std::unordered_map<std::string, std::size_t> by_id;
    std::size_t rows = 0;
    while (next_line()) {
        if (line.empty()) continue;
        std::string_view rest = line;
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if (f < 3) {
                if (comma == std::string_view::npos)
                    throw ParseError(lineno, "expected 4 comma-separated fields");
                fields[f] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos)
                    throw ParseError(lineno, "expected 4 comma-separated fields");
                fields[f] = rest;
            }
        }
        if (fields[0].empty()) throw ParseError(lineno, "empty traj_id");
        const Sample s{parse_real(fields[1], lineno, "x"), parse_real(fields[2], lineno, "y"),
                       parse_real(fields[3], lineno, "t")};
        std::string id(fields[0]);
        auto [it, inserted] = by_id.try_emplace(id, trajs.size());
        if (inserted) trajs.push_back({id, {}});
        auto& samples = trajs[it->second].samples;
        if (!samples.empty() && !(s.t > samples.back().t))
            throw ParseError(lineno, "time not strictly increasing in trajectory '" + id + "'");
        samples.push_back(s);
        ++rows;
    }
    if (rows == 0) throw InputError("empty file: no data rows");

    std::vector<Trajectory> kept;
    kept.reserve(trajs.size());
    for (auto& t : trajs) {
        if (t.samples.size() < 2) {
            if (report)
                report->warnings.push_back("trajectory '" + t.id +
                                           "' has fewer than 2 samples; dropped");
            continue;
        }
        kept.push_back(std::move(t));
    }
    return Dataset(std::move(kept), grid_cells);
}

Dataset load_trajectories_file(const std::string& path, LoadReport* report, int grid_cells) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return load_trajectories(in, report, grid_cells);
}

std::vector<bool> apply_filter(const Dataset& ds, double filter_value) {
    std::vector<bool> vis(ds.sample_count());
    for (std::size_t i = 0; i < vis.size(); ++i) vis[i] = time_visible(ds.time(i), filter_value);
    return vis;
}

HeatmapGrid project_heatmap(const Dataset& ds, Axis axis, int nu, int nv) {
    if (nu < 1 || nv < 1) throw InputError("heatmap resolution must be >= 1");
    HeatmapGrid g{axis, nu, nv, std::vector<std::uint64_t>(std::size_t(nu) * nv, 0)};
    std::span<const double> us, vs;
    switch (axis) {
    case Axis::T: us = ds.xs(), vs = ds.zs(); break;
    case Axis::X: us = ds.zs(), vs = ds.ys(); break;
    case Axis::Y: us = ds.xs(), vs = ds.ys(); break;
    }
    auto bin = [](double c, int n) {
        const int b = int(std::floor(c * n));
        return std::clamp(b, 0, n - 1);
    };
    for (std::size_t i = 0; i < ds.sample_count(); ++i)
        ++g.counts[std::size_t(bin(vs[i], nv)) * nu + std::size_t(bin(us[i], nu))];
    return g;
}

Axis parse_axis(const std::string& name) {
    if (name == "x" || name == "X") return Axis::X;
    if (name == "y" || name == "Y") return Axis::Y;
    if (name == "t" || name == "T") return Axis::T;
    throw InputError("unknown axis '" + name + "' (expected x, y or t)");
}

} // namespace portalens
