#pragma once

// JSON, CSV and SVG formats, and atomic file output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgk/admissibility.hpp"
#include "lgk/boundary_data.hpp"
#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"
#include "lgk/levelset.hpp"
#include "lgk/oracle.hpp"

namespace lgk::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

/// Writes through a sibling temp file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot rename onto " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::BadInput, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadInput, what + ": " + e.what());
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- domain -----------------------------------------------------------------

inline json to_json(const ConvexDomain& d) {
    json v = json::array(), s = json::array();
    for (const auto& p : d.vertices()) v.push_back({p.x, p.y});
    for (char c : d.smooth_flags()) s.push_back(c != 0);
    const auto& t = d.tolerances();
    json tol{{"geom_rel", t.geom_rel}, {"flat_rel", t.flat_rel}, {"angle", t.angle}};
    if (t.flat_abs) tol["flat_abs"] = *t.flat_abs;
    json out{{"vertices", v}, {"smooth_flags", s}};
    out["accumulation_vertex"] = d.accumulation_vertex() ? json(*d.accumulation_vertex()) : json(nullptr);
    out["tolerances"] = tol;
    return out;
}

inline ConvexDomain domain_from_json(const json& j) {
    try {
        std::vector<Point> chain;
        for (const auto& p : j.at("vertices")) {
            if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::BadInput, "vertex must be [x, y]");
            chain.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        std::vector<bool> smooth(chain.size(), false);
        if (j.contains("smooth_flags")) {
            const auto& s = j["smooth_flags"];
            if (s.size() != chain.size()) throw Error(ErrorKind::BadInput, "smooth_flags must match vertices");
            for (size_t i = 0; i < s.size(); ++i) smooth[i] = s[i].get<bool>();
        }
        Tolerances tol;
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            tol.geom_rel = t.value("geom_rel", tol.geom_rel);
            tol.flat_rel = t.value("flat_rel", tol.flat_rel);
            tol.angle = t.value("angle", tol.angle);
            if (t.contains("flat_abs") && !t["flat_abs"].is_null()) tol.flat_abs = t["flat_abs"].get<double>();
            if (!(tol.geom_rel > 0) || !(tol.flat_rel > 0) || !(tol.angle > 0))
                throw Error(ErrorKind::BadInput, "tolerances must be positive");
        }
        std::optional<int> acc;
        if (j.contains("accumulation_vertex") && !j["accumulation_vertex"].is_null())
            acc = j["accumulation_vertex"].get<int>();
        return build_domain(std::move(chain), std::move(smooth), tol, acc);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadInput, std::string("domain JSON: ") + e.what());
    }
}

// ---- boundary data ----------------------------------------------------------

inline json to_json(const BoundaryFunction& f) {
    json pieces = json::array();
    for (const auto& g : f.segments()) pieces.push_back({{"s0", g.s0}, {"s1", g.s1}, {"kind", "linear"}, {"v0", g.v0}, {"v1", g.v1}});
    json jumps = json::array();
    for (const auto& jp : f.jumps()) jumps.push_back({{"s", jp.s}, {"left", jp.left}, {"right", jp.right}});
    return {{"period", f.period()}, {"pieces", pieces}, {"jumps", jumps}};
}

/// `period` defaults to the perimeter of `dom`.
inline BoundaryFunction data_from_json(const json& j, const ConvexDomain& dom) {
    try {
        std::vector<Piece> pieces;
        for (const auto& p : j.at("pieces")) {
            Piece q;
            q.s0 = p.at("s0").get<double>();
            q.s1 = p.at("s1").get<double>();
            const auto kind = p.value("kind", std::string("linear"));
            if (kind == "constant") {
                q.kind = PieceKind::Constant;
                q.v0 = q.v1 = p.at("v0").get<double>();
            } else if (kind == "linear") {
                q.kind = PieceKind::Linear;
                q.v0 = p.at("v0").get<double>();
                q.v1 = p.at("v1").get<double>();
            } else if (kind == "samples") {
                q.kind = PieceKind::Samples;
                q.samples = p.at("samples").get<std::vector<double>>();
            } else {
                throw Error(ErrorKind::BadInput, "unknown piece kind '" + kind + "'");
            }
            pieces.push_back(std::move(q));
        }
        std::vector<Jump> jumps;
        if (j.contains("jumps"))
            for (const auto& x : j["jumps"]) jumps.push_back({x.at("s").get<double>(), x.at("left").get<double>(), x.at("right").get<double>()});
        const double P = j.value("period", dom.perimeter());
        if (std::abs(P - dom.perimeter()) > 1e-9 * dom.perimeter())
            throw Error(ErrorKind::BadInput, "data period differs from the domain perimeter");
        return BoundaryFunction::from_pieces(pieces, dom.perimeter(), jumps);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadInput, std::string("data JSON: ") + e.what());
    }
}

struct Problem {
    ConvexDomain domain;
    BoundaryFunction data;
};

/// A problem document holds {"domain": ..., "data": ...}; a bare domain or data file is also accepted
/// when the other half comes from a second file.
inline Problem load_problem(const std::string& domain_path, const std::string& data_path) {
    const json dj = parse_json(read_file(domain_path), domain_path);
    const json& dom_j = dj.contains("domain") ? dj["domain"] : dj;
    auto dom = domain_from_json(dom_j);
    json fj;
    if (!data_path.empty())
        fj = parse_json(read_file(data_path), data_path);
    else if (dj.contains("data"))
        fj = dj["data"];
    else
        throw Error(ErrorKind::BadInput, "no boundary data given");
    const json& data_j = fj.contains("data") ? fj["data"] : fj;
    auto f = data_from_json(data_j, dom);
    return {std::move(dom), std::move(f)};
}

inline json to_json(const Problem& p) { return {{"schema", kSchema}, {"domain", to_json(p.domain)}, {"data", to_json(p.data)}}; }

// ---- reports ----------------------------------------------------------------

inline json point_json(const std::optional<Point>& p) { return p ? json{p->x, p->y} : json(nullptr); }

inline json to_json(const AdmissibilityReport& r, const ConvexDomain& dom) {
    json parts = json::array();
    for (const auto& part : r.parts) {
        const auto& fp = dom.flat_parts()[part.flat_part];
        json humps = json::array();
        for (const auto& h : part.humps)
            humps.push_back({{"a", {h.hump.a.x, h.hump.a.y}},
                             {"b", {h.hump.b.x, h.hump.b.y}},
                             {"value", h.hump.value},
                             {"kind", to_string(h.hump.kind)},
                             {"d_a", std::isfinite(h.d_a) ? json(h.d_a) : json("inf")},
                             {"d_b", std::isfinite(h.d_b) ? json(h.d_b) : json("inf")},
                             {"lhs", std::isfinite(h.lhs) ? json(h.lhs) : json("inf")},
                             {"rhs", h.rhs},
                             {"deficit", std::isfinite(h.lhs) ? json(h.lhs - h.rhs) : json("inf")},
                             {"y", point_json(h.y)},
                             {"z", point_json(h.z)},
                             {"verdict", to_string(h.verdict)},
                             {"reason", h.reason}});
        json c1{{"verdict", to_string(part.c1.verdict)}, {"variant", to_string(part.c1.variant)}};
        if (part.c1.breakpoint) {
            const double s = *part.c1.breakpoint;
            c1["breakpoint_s"] = s;
            const Point b = dom.point_at(s);
            c1["breakpoint"] = {b.x, b.y};
        }
        if (part.c1.eps) c1["eps"] = *part.c1.eps;
        if (!part.c1.reason.empty()) c1["reason"] = part.c1.reason;
        parts.push_back({{"flat_part", part.flat_part},
                         {"p_l", {fp.p_l.x, fp.p_l.y}},
                         {"p_r", {fp.p_r.x, fp.p_r.y}},
                         {"condition", to_string(part.condition)},
                         {"verdict", to_string(part.verdict)},
                         {"monotone", part.monotone},
                         {"condition1", c1},
                         {"humps", humps},
                         {"strict_extrema", part.strict_extrema},
                         {"certificate", part.certificate}});
    }
    return {{"verdict", to_string(r.global)}, {"admissible", r.admissible()}, {"flat_parts", parts}};
}

// ---- CSV --------------------------------------------------------------------

/// Cells of `g` inside the mask, row by row from the bottom, x fastest.
inline std::string to_csv(const GridFunction& g) {
    std::string out = "x,y,u\n";
    char buf[96];
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside(i, j)) continue;
            const Point c = g.center(i, j);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c.x, c.y, g.u[g.index(i, j)]);
            out += buf;
        }
    return out;
}

/// Rebuilds the lattice from the listed cell centres; spacing is the smallest gap per axis.
inline GridFunction grid_from_csv(const std::string& text, const std::string& what = "csv") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,y,u") throw Error(ErrorKind::BadInput, what + ": header must be x,y,u");
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 3> r{};
        std::istringstream ls(line);
        std::string cell;
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ls, cell, ',')) throw Error(ErrorKind::BadInput, what + ": short row '" + line + "'");
            try {
                size_t used = 0;
                r[k] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(ErrorKind::BadInput, what + ": bad number '" + cell + "'");
            }
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw Error(ErrorKind::BadInput, what + ": no rows");
    auto axis = [&](int k, double& lo, double& step, int& n) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[k]);
        std::sort(v.begin(), v.end());
        lo = v.front();
        step = INFINITY;
        const double tiny = 1e-9 * std::max(1.0, v.back() - v.front());
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i] - v[i - 1] > tiny) step = std::min(step, v[i] - v[i - 1]);
        if (!std::isfinite(step)) step = 1;
        n = static_cast<int>(std::lround((v.back() - lo) / step)) + 1;
    };
    GridFunction g;
    axis(0, g.x0, g.hx, g.nx);
    axis(1, g.y0, g.hy, g.ny);
    if (static_cast<double>(g.nx) * g.ny > 1e8) throw Error(ErrorKind::BadInput, what + ": irregular grid");
    g.mask.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    g.u.assign(g.mask.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        const double fi = (r[0] - g.x0) / g.hx, fj = (r[1] - g.y0) / g.hy;
        const long i = std::lround(fi), j = std::lround(fj);
        if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6) throw Error(ErrorKind::GridMismatch, what + ": points are not on a lattice");
        const int c = g.index(static_cast<int>(i), static_cast<int>(j));
        if (g.mask[c]) throw Error(ErrorKind::BadInput, what + ": duplicate cell");
        g.mask[c] = 1;
        g.u[c] = r[2];
    }
    return g;
}

/// The cells of a `rows`×`cols` lattice over the bounding box of Ω whose centres lie in Ω.
inline GridFunction lattice_over(const ConvexDomain& dom, int rows, int cols) {
    if (rows < 2 || cols < 2) throw Error(ErrorKind::BadInput, "grid needs at least 2x2 cells");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& v : dom.vertices()) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    GridFunction g;
    g.nx = cols;
    g.ny = rows;
    g.hx = (xmax - xmin) / cols;
    g.hy = (ymax - ymin) / rows;
    g.x0 = xmin + 0.5 * g.hx;
    g.y0 = ymin + 0.5 * g.hy;
    g.mask.assign(static_cast<size_t>(rows) * cols, 0);
    g.u.assign(g.mask.size(), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i) g.mask[g.index(i, j)] = dom.contains(g.center(i, j)) ? 1 : 0;
    return g;
}

// ---- SVG --------------------------------------------------------------------

struct SvgChord {
    Point p, q;
    double t = 0;
};

struct SvgScene {
    std::vector<Point> outline;
    std::vector<SvgChord> chords;
    std::vector<FatRegion> fat;
    double t_min = 0, t_max = 1;
};

/// Chords of every `stride`-th level, at most `max_levels` of them, mapped through `to_world`.
inline void add_solution(SvgScene& sc, const LevelSetSolution& u, int max_levels = 64,
                         const std::function<Point(const Point&)>& to_world = {}) {
    auto map = [&](const Point& p) { return to_world ? to_world(p) : p; };
    const int n = static_cast<int>(u.cuts.size());
    const int stride = std::max(1, (n + max_levels - 1) / max_levels);
    for (int k = 0; k < n; k += stride)
        for (const auto& c : u.cuts[k].chords) sc.chords.push_back({map(c.p), map(c.q), u.cuts[k].t});
    for (const auto& fr : u.fat_regions) {
        FatRegion r{{}, fr.value};
        for (const auto& p : fr.polygon) r.polygon.push_back(map(p));
        sc.fat.push_back(std::move(r));
    }
}

inline std::string color_for(double s) {
    s = std::clamp(s, 0.0, 1.0);
    // blue → red through purple
    const int r = static_cast<int>(std::lround(40 + 200 * s)), g = 40, b = static_cast<int>(std::lround(240 - 200 * s));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

inline std::string to_svg(const SvgScene& sc, double width_px = 640) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    auto grow = [&](const Point& v) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    };
    for (const auto& v : sc.outline) grow(v);
    for (const auto& c : sc.chords) grow(c.p), grow(c.q);
    for (const auto& r : sc.fat)
        for (const auto& v : r.polygon) grow(v);
    if (!std::isfinite(xmin)) xmin = ymin = 0, xmax = ymax = 1;
    const double pad = 10;
    const double k = (width_px - 2 * pad) / std::max(xmax - xmin, 1e-300);
    const double height_px = 2 * pad + k * (ymax - ymin);
    auto X = [&](double x) { return pad + k * (x - xmin); };
    auto Y = [&](double y) { return pad + k * (ymax - y); };
    auto norm_t = [&](double t) { return sc.t_max > sc.t_min ? (t - sc.t_min) / (sc.t_max - sc.t_min) : 0.0; };
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  width_px, std::ceil(height_px), width_px, std::ceil(height_px));
    out += buf;
    auto points = [&](const std::vector<Point>& poly) {
        std::string s;
        for (size_t i = 0; i < poly.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", X(poly[i].x), Y(poly[i].y));
            s += buf;
        }
        return s;
    };
    out += "<g id=\"fat\">\n";
    for (const auto& fr : sc.fat)
        out += "<polygon points=\"" + points(fr.polygon) + "\" fill=\"" + color_for(norm_t(fr.value)) +
               "\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
    out += "</g>\n<g id=\"chords\" stroke-width=\"1\">\n";
    for (const auto& c : sc.chords) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"%s\"/>\n", X(c.p.x),
                      Y(c.p.y), X(c.q.x), Y(c.q.y), color_for(norm_t(c.t)).c_str());
        out += buf;
    }
    out += "</g>\n";
    out += "<polygon id=\"outline\" points=\"" + points(sc.outline) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    out += "</svg>\n";
    return out;
}

inline SvgScene scene_for(const ConvexDomain& dom, const BoundaryFunction& f) {
    SvgScene sc;
    sc.outline.assign(dom.vertices().begin(), dom.vertices().end());
    sc.t_min = f.min();
    sc.t_max = f.max();
    return sc;
}

}  // namespace lgk::io
