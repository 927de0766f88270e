#pragma once

// Convex planar domains with flat boundary parts.
//
// A domain is a closed counterclockwise polygon. Each edge carries a flag:
// flat edges are genuine straight pieces of the boundary, curve-sample edges
// are chords of a sampled strictly convex arc and never form a flat part.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lgk/errors.hpp"

namespace lgk {

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point& operator+=(const Point& o) { x += o.x; y += o.y; return *this; }
    Point& operator-=(const Point& o) { x -= o.x; y -= o.y; return *this; }
    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(double s, const Point& p) { return {s * p.x, s * p.y}; }
    friend Point operator*(const Point& p, double s) { return {s * p.x, s * p.y}; }
    friend Point operator/(const Point& p, double s) { return {p.x / s, p.y / s}; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double dist(const Point& a, const Point& b) { return norm(a - b); }
inline Point perp(const Point& a) { return {-a.y, a.x}; }  // rotate +90 degrees
inline Point lerp(const Point& a, const Point& b, double t) { return a + t * (b - a); }
inline Point unit(const Point& a) { return a / norm(a); }

/// Signed area of the triangle (a, b, c) times two; positive for a left turn.
inline double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

struct Segment {
    Point a;
    Point b;
    double length() const { return dist(a, b); }
};

/// Closest point of segment [a, b] to p.
inline Point closest_on_segment(const Point& p, const Point& a, const Point& b) {
    const Point d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return a;
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return a + t * d;
}

inline double dist_to_segment(const Point& p, const Point& a, const Point& b) {
    return dist(p, closest_on_segment(p, a, b));
}

/// True when the open segments (a,b) and (c,d) cross at a single interior point.
/// Shared endpoints and collinear overlaps do not count.
inline bool segments_cross_properly(const Point& a, const Point& b, const Point& c, const Point& d,
                                    double eps) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    const double s1 = eps * dist(a, b);
    const double s2 = eps * dist(c, d);
    return ((o1 > s1 && o2 < -s1) || (o1 < -s1 && o2 > s1)) &&
           ((o3 > s2 && o4 < -s2) || (o3 < -s2 && o4 > s2));
}

/// Intersection of the lines through (a, b) and (c, d); nullopt when parallel.
inline std::optional<Point> line_intersection(const Point& a, const Point& b, const Point& c,
                                              const Point& d) {
    const Point r = b - a;
    const Point s = d - c;
    const double den = cross(r, s);
    if (std::abs(den) <= 1e-300) return std::nullopt;
    const double t = cross(c - a, s) / den;
    return a + t * r;
}

struct Tolerances {
    double geom_rel = 1e-9;   // ε_geom / diam
    double flat_rel = 1e-3;   // ε_flat / diam
    double angle = 1e-6;      // ε_ang, radians
    std::optional<double> flat_abs;  // overrides flat_rel·diam when set
};

enum class JunctionKind { Corner, Tangential };

struct FlatPart {
    int id = 0;
    int first_edge = 0;   // edges first_edge .. first_edge+edge_count-1 (mod n)
    int edge_count = 1;
    Point p_l;            // start of ℓ in counterclockwise order
    Point p_r;            // end of ℓ
    Point direction;      // ν = (p_r − p_l)/|p_r − p_l|
    double s_a = 0.0;     // arclength of p_l
    double s_b = 0.0;     // arclength of p_r (s_b > s_a; may exceed the perimeter when wrapping)
    double end_angle_l = std::numbers::pi;
    double end_angle_r = std::numbers::pi;
    JunctionKind junction_l = JunctionKind::Corner;
    JunctionKind junction_r = JunctionKind::Corner;
    bool obtuse_l = false;
    bool obtuse_r = false;

    double length() const { return dist(p_l, p_r); }
    Point inward_normal() const { return perp(direction); }
};

/// Side segments of the strip S(ℓ) = (∪ L_x) ∩ Ω.
struct Strip {
    FlatPart base;
    Segment s_l;
    Segment s_r;
};

/// Closed half-plane {x : (x − origin)·normal ≥ 0}.
struct HalfPlane {
    Point origin;
    Point normal;  // unit, pointing into the half-plane
    double signed_distance(const Point& x) const { return dot(x - origin, normal); }
    bool contains(const Point& x, double tol = 0.0) const { return signed_distance(x) >= -tol; }
};

class ConvexDomain {
public:
    ConvexDomain() = default;

    std::span<const Point> vertices() const { return vertices_; }
    std::span<const char> smooth_flags() const { return smooth_; }
    std::span<const FlatPart> flat_parts() const { return flat_parts_; }
    std::span<const double> corner_angles() const { return corner_angles_; }
    std::optional<int> accumulation_vertex() const { return accumulation_vertex_; }
    const Tolerances& tolerances() const { return tol_; }

    int size() const { return static_cast<int>(vertices_.size()); }
    const Point& vertex(int i) const { return vertices_[wrap(i)]; }
    Point edge(int i) const { return vertex(i + 1) - vertex(i); }
    bool edge_smooth(int i) const { return smooth_[wrap(i)] != 0; }
    double perimeter() const { return perimeter_; }
    double diameter() const { return diameter_; }
    double eps_geom() const { return tol_.geom_rel * diameter_; }
    double eps_flat() const { return tol_.flat_abs ? *tol_.flat_abs : tol_.flat_rel * diameter_; }
    double arclength_at_vertex(int i) const { return cum_[wrap(i)]; }
    bool strictly_convex() const { return flat_parts_.empty(); }

    int wrap(int i) const {
        const int n = size();
        return ((i % n) + n) % n;
    }

    double wrap_s(double s) const {
        double r = std::fmod(s, perimeter_);
        if (r < 0) r += perimeter_;
        return r;
    }

    /// Edge index containing arclength s (edge i covers [cum_i, cum_{i+1})).
    int edge_at(double s) const {
        s = wrap_s(s);
        auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        int i = static_cast<int>(it - cum_.begin()) - 1;
        return std::clamp(i, 0, size() - 1);
    }

    Point point_at(double s) const {
        s = wrap_s(s);
        const int i = edge_at(s);
        const double len = edge_len_[i];
        const double t = len > 0 ? (s - cum_[i]) / len : 0.0;
        return lerp(vertex(i), vertex(i + 1), std::clamp(t, 0.0, 1.0));
    }

    /// Outward unit normal of the edge containing s.
    Point outward_normal_at(double s) const { return -1.0 * perp(unit(edge(edge_at(s)))); }

    /// Arclength of the boundary point nearest to p.
    double arclength_of(const Point& p) const {
        double best = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        for (int i = 0; i < size(); ++i) {
            const Point c = closest_on_segment(p, vertex(i), vertex(i + 1));
            const double d = dist(p, c);
            if (d < best) {
                best = d;
                best_s = cum_[i] + dist(vertex(i), c);
            }
        }
        return wrap_s(best_s);
    }

    bool contains(const Point& p, double tol = 0.0) const {
        for (int i = 0; i < size(); ++i) {
            const Point e = edge(i);
            if (cross(e, p - vertex(i)) < -tol * norm(e)) return false;
        }
        return true;
    }

    /// Distance from p to the closed region (0 inside).
    double distance_to(const Point& p) const {
        if (contains(p)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < size(); ++i) best = std::min(best, dist_to_segment(p, vertex(i), vertex(i + 1)));
        return best;
    }

    double area() const {
        double a = 0.0;
        for (int i = 0; i < size(); ++i) a += cross(vertex(i), vertex(i + 1));
        return 0.5 * a;
    }

    /// Counterclockwise arclength from s0 to s1 in [0, perimeter).
    double ccw_gap(double s0, double s1) const { return wrap_s(s1 - s0); }

    /// Index of the flat part containing edge i, or -1.
    int flat_part_of_edge(int i) const { return edge_flat_[wrap(i)]; }

    /// Flat part containing the boundary point at arclength s (edge interior or endpoints), or -1.
    int flat_part_at(double s) const { return flat_part_of_edge(edge_at(s)); }

    friend ConvexDomain build_domain(std::vector<Point> chain, std::vector<bool> smooth,
                                     const Tolerances& tol, std::optional<int> accumulation_vertex);

private:
    std::vector<Point> vertices_;
    std::vector<char> smooth_;
    std::vector<double> cum_;
    std::vector<double> edge_len_;
    std::vector<FlatPart> flat_parts_;
    std::vector<int> edge_flat_;
    std::vector<double> corner_angles_;
    std::optional<int> accumulation_vertex_;
    Tolerances tol_;
    double perimeter_ = 0.0;
    double diameter_ = 0.0;
};

namespace detail {

inline double turn_angle(const Point& e0, const Point& e1) {
    return std::atan2(cross(e0, e1), dot(e0, e1));
}

}  // namespace detail

/// Builds a validated domain from a closed vertex chain. smooth[i] flags edge i (from vertex i to
/// i+1) as a curve sample. A clockwise chain is reversed; a repeated closing vertex is dropped.
inline ConvexDomain build_domain(std::vector<Point> chain, std::vector<bool> smooth,
                                 const Tolerances& tol = {},
                                 std::optional<int> accumulation_vertex = std::nullopt) {
    if (smooth.empty()) smooth.assign(chain.size(), false);
    if (smooth.size() != chain.size())
        throw Error(ErrorKind::BadInput, "smooth_flags must have one entry per vertex");
    if (chain.size() >= 2 && chain.front() == chain.back()) {
        chain.pop_back();
        smooth.pop_back();
    }
    const int n = static_cast<int>(chain.size());
    if (n < 3) throw Error(ErrorKind::DegenerateChain, "need at least 3 vertices");

    double diam = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) diam = std::max(diam, dist(chain[i], chain[j]));
    if (diam <= 0) throw Error(ErrorKind::DegenerateChain, "all vertices coincide");
    const double eps = tol.geom_rel * diam;

    double area2 = 0.0;
    for (int i = 0; i < n; ++i) area2 += cross(chain[i], chain[(i + 1) % n]);
    if (std::abs(area2) <= eps * diam) throw Error(ErrorKind::DegenerateChain, "zero-area chain");
    if (area2 < 0) {
        // reverse orientation; edge i (v_i → v_{i+1}) becomes edge n−2−i of the reversed chain
        std::vector<Point> rev(chain.rbegin(), chain.rend());
        std::vector<bool> rs(n);
        for (int i = 0; i < n; ++i) rs[(2 * n - 2 - i) % n] = smooth[i];
        chain = std::move(rev);
        smooth = std::move(rs);
        if (accumulation_vertex) accumulation_vertex = n - 1 - *accumulation_vertex;
    }
    if (accumulation_vertex && (*accumulation_vertex < 0 || *accumulation_vertex >= n))
        throw Error(ErrorKind::BadInput, "accumulation_vertex out of range");

    for (int i = 0; i < n; ++i)
        if (dist(chain[i], chain[(i + 1) % n]) <= eps)
            throw Error(ErrorKind::DegenerateChain, "repeated vertex " + std::to_string(i));

    ConvexDomain d;
    d.vertices_ = std::move(chain);
    d.smooth_.assign(n, 0);
    for (int i = 0; i < n; ++i) d.smooth_[i] = smooth[i] ? 1 : 0;
    d.tol_ = tol;
    d.diameter_ = diam;
    d.accumulation_vertex_ = accumulation_vertex;

    d.cum_.resize(n);
    d.edge_len_.resize(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        d.cum_[i] = s;
        d.edge_len_[i] = dist(d.vertices_[i], d.vertices_[(i + 1) % n]);
        s += d.edge_len_[i];
    }
    d.perimeter_ = s;

    // convexity: every turn is a left turn up to ε_geom, and the chain winds once
    double total_turn = 0.0;
    std::vector<double> turn(n);
    for (int i = 0; i < n; ++i) {
        const Point e0 = d.edge(i - 1);
        const Point e1 = d.edge(i);
        const double c = cross(e0, e1) / norm(e1);  // height of the turn, length units
        if (c < -eps) throw Error(ErrorKind::NonConvex, "right turn at vertex " + std::to_string(i));
        turn[i] = detail::turn_angle(e0, e1);
        total_turn += turn[i];
    }
    if (std::abs(total_turn - 2 * std::numbers::pi) > 1e-6)
        throw Error(ErrorKind::NonConvex, "chain is not simple (total turning != 2π)");

    // maximal runs of collinear flat edges
    auto collinear_join = [&](int v) {  // edges v−1 and v meet without a turn
        return !d.edge_smooth(v - 1) && !d.edge_smooth(v) &&
               std::abs(cross(d.edge(v - 1), d.edge(v))) / norm(d.edge(v)) <= eps;
    };
    d.edge_flat_.assign(n, -1);
    int start = -1;
    for (int v = 0; v < n; ++v)
        if (!collinear_join(v)) { start = v; break; }
    if (start < 0) throw Error(ErrorKind::DegenerateChain, "all edges collinear");

    auto is_tangential = [&](int v, int curve_edge, int step) {
        // junction at vertex v between a flat run and the curve-sample edge curve_edge;
        // tangential when the turn there is no larger than the curve's own sample turn
        if (!d.edge_smooth(curve_edge)) return std::abs(turn[v]) <= tol.angle;
        const int next_v = step > 0 ? d.wrap(v + 1) : d.wrap(v - 1);
        const bool next_is_curve = step > 0 ? d.edge_smooth(next_v) : d.edge_smooth(next_v - 1);
        const double sample_turn = next_is_curve ? std::abs(turn[next_v]) : 0.0;
        return std::abs(turn[v]) <= sample_turn * (1.0 + 1e-6) + tol.angle;
    };

    const double eflat = d.eps_flat();
    for (int k = 0; k < n;) {
        const int e = d.wrap(start + k);
        if (d.edge_smooth(e)) { ++k; continue; }
        int cnt = 1;
        double len = d.edge_len_[e];
        while (k + cnt < n && collinear_join(d.wrap(e + cnt))) {
            len += d.edge_len_[d.wrap(e + cnt)];
            ++cnt;
        }
        if (len > eflat) {
            FlatPart fp;
            fp.id = static_cast<int>(d.flat_parts_.size());
            fp.first_edge = e;
            fp.edge_count = cnt;
            fp.p_l = d.vertex(e);
            fp.p_r = d.vertex(e + cnt);
            fp.direction = unit(fp.p_r - fp.p_l);
            fp.s_a = d.cum_[e];
            fp.s_b = fp.s_a + len;
            const int vl = e;
            const int vr = d.wrap(e + cnt);
            fp.junction_l = is_tangential(vl, vl - 1, -1) ? JunctionKind::Tangential : JunctionKind::Corner;
            fp.junction_r = is_tangential(vr, vr, +1) ? JunctionKind::Tangential : JunctionKind::Corner;
            fp.end_angle_l = fp.junction_l == JunctionKind::Tangential ? std::numbers::pi : std::numbers::pi - turn[vl];
            fp.end_angle_r = fp.junction_r == JunctionKind::Tangential ? std::numbers::pi : std::numbers::pi - turn[vr];
            fp.obtuse_l = fp.end_angle_l >= std::numbers::pi / 2 + tol.angle;
            fp.obtuse_r = fp.end_angle_r >= std::numbers::pi / 2 + tol.angle;
            for (int j = 0; j < cnt; ++j) d.edge_flat_[d.wrap(e + j)] = fp.id;
            d.flat_parts_.push_back(fp);
        }
        k += cnt;
    }
    std::sort(d.flat_parts_.begin(), d.flat_parts_.end(),
              [](const FlatPart& a, const FlatPart& b) { return a.s_a < b.s_a; });
    for (int i = 0; i < static_cast<int>(d.flat_parts_.size()); ++i) {
        auto& fp = d.flat_parts_[i];
        for (int j = 0; j < fp.edge_count; ++j) d.edge_flat_[d.wrap(fp.first_edge + j)] = i;
        fp.id = i;
    }

    d.corner_angles_.resize(n);
    for (int v = 0; v < n; ++v) {
        const bool both_curve = d.edge_smooth(v - 1) && d.edge_smooth(v);
        d.corner_angles_[v] = both_curve ? std::numbers::pi : std::numbers::pi - turn[v];
    }
    for (const auto& fp : d.flat_parts_) {
        d.corner_angles_[fp.first_edge] = fp.end_angle_l;
        d.corner_angles_[d.wrap(fp.first_edge + fp.edge_count)] = fp.end_angle_r;
    }
    return d;
}

inline ConvexDomain build_domain(const std::vector<Point>& chain, const Tolerances& tol = {}) {
    return build_domain(chain, std::vector<bool>(chain.size(), false), tol, std::nullopt);
}

inline HalfPlane half_plane(const FlatPart& fp) { return {fp.p_l, fp.inward_normal()}; }

/// Orthogonal projection onto the line containing ℓ (π_ℓ).
inline Point project_onto_line(const Point& p, const FlatPart& fp) {
    return fp.p_l + dot(p - fp.p_l, fp.direction) * fp.direction;
}

inline Point project_onto_line(const Point& p, const Point& a, const Point& b) {
    const Point d = unit(b - a);
    return a + dot(p - a, d) * d;
}

/// Nearest point of the closed domain (π).
inline Point project_onto_convex(const Point& p, const ConvexDomain& dom) {
    if (dom.contains(p)) return p;
    double best = std::numeric_limits<double>::infinity();
    Point best_p = p;
    for (int i = 0; i < dom.size(); ++i) {
        const Point c = closest_on_segment(p, dom.vertex(i), dom.vertex(i + 1));
        const double dd = dist(p, c);
        if (dd < best) {
            best = dd;
            best_p = c;
        }
    }
    return best_p;
}

/// Farthest parameter t ≥ 0 with origin + t·dir inside the domain.
inline double ray_exit(const ConvexDomain& dom, const Point& origin, const Point& dir) {
    double t_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dom.size(); ++i) {
        const Point e = unit(dom.edge(i));
        const double a = cross(e, origin - dom.vertex(i));  // signed distance, ≥ 0 inside
        const double b = cross(e, dir);
        if (b < -1e-12) t_max = std::min(t_max, std::max(0.0, a / -b));
    }
    return std::isfinite(t_max) ? t_max : 0.0;
}

inline Strip strip_of(const ConvexDomain& dom, const FlatPart& fp) {
    const Point n = fp.inward_normal();
    const double tl = ray_exit(dom, fp.p_l, n);
    const double tr = ray_exit(dom, fp.p_r, n);
    return {fp, {fp.p_l, fp.p_l + tl * n}, {fp.p_r, fp.p_r + tr * n}};
}

/// Hausdorff distance between two closed convex polygons (attained at vertices).
inline double hausdorff_distance(const ConvexDomain& a, const ConvexDomain& b) {
    double h = 0.0;
    for (const auto& v : a.vertices()) h = std::max(h, b.distance_to(v));
    for (const auto& v : b.vertices()) h = std::max(h, a.distance_to(v));
    return h;
}

}  // namespace lgk

namespace lgk {

/// Nearest point of the boundary arc [s0, s1] (unrolled arclength, s0 <= s1) to p.
struct ArcNearest {
    double distance = std::numeric_limits<double>::infinity();
    Point point;
    double s = 0;
    int edge = -1;
};

struct ArcPiece {
    double s0, s1;  // unrolled
    int edge;
};

/// Splits the unrolled arc [s0, s1] at vertices.
inline std::vector<ArcPiece> split_arc(const ConvexDomain& dom, double s0, double s1) {
    std::vector<ArcPiece> out;
    const double P = dom.perimeter();
    const double base = std::floor(s0 / P) * P;
    for (int rep = 0; rep < 3; ++rep)
        for (int e = 0; e < dom.size(); ++e) {
            const double es0 = base + rep * P + dom.arclength_at_vertex(e);
            const double es1 = es0 + dist(dom.vertex(e), dom.vertex(e + 1));
            const double a = std::max(s0, es0), b = std::min(s1, es1);
            if (b > a || (b == a && s0 == s1 && a >= es0 && a < es1)) out.push_back({a, b, e});
        }
    return out;
}

inline ArcNearest nearest_on_arc(const ConvexDomain& dom, const Point& p, double s0, double s1) {
    ArcNearest best;
    for (const auto& pc : split_arc(dom, s0, s1)) {
        const Point pa = dom.point_at(pc.s0), pb = dom.point_at(pc.s1);
        const Point q = closest_on_segment(p, pa, pb);
        const double d = dist(p, q);
        if (d < best.distance) best = {d, q, dom.wrap_s(pc.s0 + dist(pa, q)), pc.edge};
    }
    return best;
}

/// Flat parts forming the truncated family that accumulates at the marked vertex p_0, ordered from
/// the farthest to the nearest. `side` is +1 when the family follows p_0 counterclockwise, −1 before it.
struct AccumulationFamily {
    int vertex = -1;
    int side = 0;
    std::vector<int> parts;
    std::optional<int> opposite;  // flat part on the other side of p_0, if it touches p_0
    bool one_sided = true;
};

inline AccumulationFamily accumulation_family(const ConvexDomain& dom) {
    AccumulationFamily fam;
    if (!dom.accumulation_vertex()) return fam;
    const int v0 = *dom.accumulation_vertex();
    fam.vertex = v0;
    auto run = [&](int dir) {
        std::vector<int> ids;
        int v = v0;
        for (int guard = 0; guard < dom.size(); ++guard) {
            const int e = dir > 0 ? v : dom.wrap(v - 1);
            const int id = dom.flat_part_of_edge(e);
            if (id < 0) break;
            const auto& fp = dom.flat_parts()[id];
            if (std::find(ids.begin(), ids.end(), id) != ids.end()) break;
            ids.push_back(id);
            v = dir > 0 ? dom.wrap(fp.first_edge + fp.edge_count) : fp.first_edge;
        }
        return ids;  // nearest first
    };
    auto decreasing_prefix = [&](const std::vector<int>& ids) {
        // lengths shrink toward p_0: ids[0] is nearest
        size_t k = ids.empty() ? 0 : 1;
        while (k < ids.size() && dom.flat_parts()[ids[k]].length() > dom.flat_parts()[ids[k - 1]].length()) ++k;
        return k;
    };
    const auto fwd = run(+1), bwd = run(-1);
    const size_t kf = decreasing_prefix(fwd), kb = decreasing_prefix(bwd);
    const bool take_fwd = kf > kb || (kf == kb && !fwd.empty() && (bwd.empty() ||
                          dom.flat_parts()[fwd[0]].length() < dom.flat_parts()[bwd[0]].length()));
    const auto& chosen = take_fwd ? fwd : bwd;
    const auto& other = take_fwd ? bwd : fwd;
    const size_t kc = take_fwd ? kf : kb, ko = take_fwd ? kb : kf;
    fam.side = take_fwd ? +1 : -1;
    // keep the decreasing prefix plus the first part that breaks it (the big part closing the family)
    for (size_t i = 0; i < std::min(chosen.size(), kc); ++i) fam.parts.push_back(chosen[i]);
    std::reverse(fam.parts.begin(), fam.parts.end());
    if (!other.empty()) fam.opposite = other[0];
    fam.one_sided = !(kc >= 3 && ko >= 3);
    return fam;
}

}  // namespace lgk
