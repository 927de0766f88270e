#pragma once

// Chord-based level-set solver on strictly convex domains.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "lgk/boundary_data.hpp"
#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"
#include "lgk/matching.hpp"
#include "lgk/parallel.hpp"

namespace lgk {

struct Endpoint {
    double s = 0;
    Point p;
    int sign = 0;  // +1 where the superlevel arc begins (ccw), −1 where it ends
};

struct Chord {
    Point p, q;
    double sp = 0, sq = 0;
    double length() const { return dist(p, q); }
};

struct LevelCut {
    double t = 0;
    bool full = false;  // whole boundary in {f ≥ t}, no chords
    std::vector<Endpoint> ends;
    std::vector<Chord> chords;
};

struct FatRegion {
    std::vector<Point> polygon;
    double value = 0;
};

/// Ordered endpoints of the boundary superlevel arcs {f ≥ t}.
inline std::vector<Endpoint> superlevel_endpoints(const ConvexDomain& dom, const BoundaryFunction& f, double t,
                                                  bool* full = nullptr) {
    const auto segs = f.segments();
    const int n = static_cast<int>(segs.size());
    const double scale = dom.perimeter() / f.period();
    std::vector<Endpoint> out;
    auto push = [&](double s, int sign) { out.push_back({s * scale, dom.point_at(s * scale), sign}); };
    for (int k = 0; k < n; ++k) {
        const auto& g = segs[k];
        const bool before = segs[(k + n - 1) % n].v1 >= t;
        const bool a0 = g.v0 >= t, a1 = g.v1 >= t;
        if (before != a0) push(g.s0, a0 ? 1 : -1);
        if (a0 != a1) {
            const double w = std::clamp((t - g.v0) / (g.v1 - g.v0), 0.0, 1.0);
            push(g.s0 + w * (g.s1 - g.s0), a1 ? 1 : -1);
        }
    }
    if (full) *full = out.empty() && segs.front().v0 >= t;
    return out;
}

/// Minimal non-crossing chord pairing of signed endpoints; chords in `avoid` may not be crossed.
inline std::vector<Chord> pair_chords(const std::vector<Endpoint>& ends, const std::vector<const Chord*>& avoid = {},
                                      double eps = 1e-12) {
    const int m = static_cast<int>(ends.size());
    std::vector<Point> pts(m);
    std::vector<int> sign(m);
    for (int i = 0; i < m; ++i) {
        pts[i] = ends[i].p;
        sign[i] = ends[i].sign;
    }
    PairFilter filter;
    std::vector<char> blocked;
    if (!avoid.empty()) {
        blocked.assign(m * m, 0);
        for (int i = 0; i < m; ++i)
            for (int k = i + 1; k < m; k += 2)
                for (const Chord* c : avoid)
                    if (segments_cross_properly(pts[i], pts[k], c->p, c->q, eps)) {
                        blocked[i * m + k] = 1;
                        break;
                    }
        filter = [&](int i, int k) { return !blocked[i * m + k]; };
    }
    const auto match = min_noncrossing_matching(pts, sign, filter);
    std::vector<Chord> out;
    out.reserve(match.pairs.size());
    for (auto [i, k] : match.pairs) out.push_back({pts[i], pts[k], ends[i].s, ends[k].s});
    return out;
}

inline LevelCut cut_level(const ConvexDomain& dom, const BoundaryFunction& f, double t,
                          const std::vector<const Chord*>& avoid = {}) {
    LevelCut c;
    c.t = t;
    c.ends = superlevel_endpoints(dom, f, t, &c.full);
    c.chords = pair_chords(c.ends, avoid, dom.tolerances().geom_rel);
    return c;
}

inline bool chords_cross(const std::vector<Chord>& a, const std::vector<Chord>& b, double eps) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (segments_cross_properly(x.p, x.q, y.p, y.q, eps)) return true;
    return false;
}

/// Quantile levels over the non-constant pieces plus a coarse uniform layer, min, max and every
/// plateau value e with e ± ε_val.
inline std::vector<double> level_grid(const BoundaryFunction& f, int count) {
    const double lo = f.min(), hi = f.max(), ev = f.eps_val();
    std::vector<double> L{lo, hi};
    if (hi - lo <= ev) return {lo};
    double moving = 0;
    for (const auto& g : f.segments())
        if (std::abs(g.v1 - g.v0) > ev) moving += g.s1 - g.s0;
    if (moving > 0) {
        std::vector<double> vals;
        const int total = std::max(20 * count, 2000);
        for (const auto& g : f.segments()) {
            if (std::abs(g.v1 - g.v0) <= ev) continue;
            const int k = std::max(2, static_cast<int>(std::ceil(total * (g.s1 - g.s0) / moving)));
            for (int j = 0; j < k; ++j) vals.push_back(g.v0 + (g.v1 - g.v0) * (j + 0.5) / k);
        }
        std::sort(vals.begin(), vals.end());
        for (int q = 1; q < count - 1; ++q) L.push_back(vals[static_cast<size_t>(q * (vals.size() - 1) / (count - 1.0))]);
    }
    const int uni = std::max(2, count / 4);
    for (int q = 1; q < uni; ++q) L.push_back(lo + (hi - lo) * q / uni);
    for (const auto& g : f.segments()) {
        if (std::abs(g.v1 - g.v0) > ev || g.s1 - g.s0 <= f.knot_tol()) continue;
        const double e = 0.5 * (g.v0 + g.v1);
        for (double v : {e - ev, e, e + ev})
            if (v >= lo && v <= hi) L.push_back(v);
    }
    std::sort(L.begin(), L.end());
    std::vector<double> out;
    for (double v : L)
        if (out.empty() || v - out.back() > 1e-13 * (hi - lo)) out.push_back(v);
    out.back() = std::max(out.back(), hi);
    return out;
}

/// Clip segment [p, q] to a convex domain; nullopt when it misses.
inline std::optional<Segment> clip_to(const ConvexDomain& dom, Point p, Point q) {
    double t0 = 0, t1 = 1;
    const Point d = q - p;
    for (int i = 0; i < dom.size(); ++i) {
        const Point a = dom.vertex(i), e = dom.edge(i);
        const Point nrm = perp(e);  // inward for ccw
        const double num = dot(p - a, nrm), den = dot(d, nrm);
        if (std::abs(den) < 1e-300) {
            if (num < 0) return std::nullopt;
            continue;
        }
        const double t = -num / den;
        if (den > 0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
        if (t0 > t1) return std::nullopt;
    }
    return Segment{p + t0 * d, p + t1 * d};
}

struct SolveOptions {
    int levels = 256;
    bool refine = true;
    double refine_rel = 1e-7;  // bisection stops below this fraction of the range
    std::vector<double> grid;  // explicit level grid, overrides `levels` when non-empty
};

class LevelSetSolution;
LevelSetSolution solve_strictly_convex(ConvexDomain domain, BoundaryFunction data, const SolveOptions& opt = {});

/// Boundary reference points for parity tests at one query point.
struct Probe {
    Point x;
    std::vector<double> s;
    std::vector<Point> b;
};

class LevelSetSolution {
public:
    std::vector<double> levels;
    std::vector<LevelCut> cuts;
    std::vector<FatRegion> fat_regions;
    std::function<double(const Point&)> evaluator;
    double A = 1, B = 1;

    double operator()(const Point& x) const { return evaluator(x); }
    const ConvexDomain& domain() const { return *dom_; }
    const BoundaryFunction& data() const { return *f_; }
    bool has_levels() const { return dom_ != nullptr; }

    Probe probe(const Point& x) const {
        Probe p{x, {}, {}};
        const double P = dom_->perimeter();
        const double s0 = dom_->arclength_of(x);
        for (int j = 0; j < 8; ++j) {
            const double s = dom_->wrap_s(s0 + P * j / 8.0 + (j ? 0.0137 * P : 0.0));
            p.s.push_back(s);
            p.b.push_back(dom_->point_at(s));
        }
        return p;
    }

    bool member(const LevelCut& c, const Probe& pr) const {
        if (c.chords.empty()) return c.full;
        const double tol = dom_->eps_geom();
        for (const auto& ch : c.chords)
            if (dist_to_segment(pr.x, ch.p, ch.q) <= tol) return true;
        for (size_t j = 0; j < pr.s.size(); ++j) {
            const Point b = pr.b[j];
            bool clean = dist(b, pr.x) > tol;
            for (const auto& e : c.ends)
                if (dist_to_segment(e.p, pr.x, b) <= tol) clean = false;
            if (!clean) continue;
            bool in = f_value(pr.s[j]) >= c.t;
            for (const auto& ch : c.chords)
                if (segments_cross_properly(pr.x, b, ch.p, ch.q, 0.0)) in = !in;
            return in;
        }
        // every reference is degenerate: x sits on the boundary next to an endpoint
        return true;
    }

    bool member(int k, const Point& x) const { return member(cuts[k], probe(x)); }

    /// sup{t : x ∈ E_t}; refines between grid levels by bisection on t.
    double level_value(const Point& x) const {
        const Probe pr = probe(x);
        int lo = 0, hi = static_cast<int>(cuts.size()) - 1;
        if (member(cuts[hi], pr)) return levels[hi];
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (member(cuts[mid], pr) ? lo : hi) = mid;
        }
        if (!opt_.refine) return levels[lo];
        const double stop = opt_.refine_rel * std::max(f_->range(), 1e-300);
        const LevelCut* low = &cuts[lo];
        LevelCut refined, upper = cuts[hi];
        double t_lo = levels[lo], t_hi = levels[hi];
        while (t_hi - t_lo > stop) {
            const double t = 0.5 * (t_lo + t_hi);
            std::vector<const Chord*> avoid;
            for (const auto& c : low->chords) avoid.push_back(&c);
            for (const auto& c : upper.chords) avoid.push_back(&c);
            LevelCut mid;
            try {
                mid = cut_level(*dom_, *f_, t, avoid);
            } catch (const Error&) {
                break;
            }
            if (member(mid, pr)) {
                t_lo = t;
                refined = std::move(mid);
                low = &refined;
            } else {
                t_hi = t;
                upper = std::move(mid);
            }
        }
        return t_lo;
    }

    /// Coarea estimate Σ Δt · chord length, chords clipped to `clip` when given.
    double tv_coarea(const ConvexDomain* clip = nullptr) const {
        std::vector<double> len(cuts.size(), 0.0);
        for (size_t k = 0; k < cuts.size(); ++k)
            for (const auto& c : cuts[k].chords) {
                if (!clip) {
                    len[k] += c.length();
                } else if (auto s = clip_to(*clip, c.p, c.q)) {
                    len[k] += dist(s->a, s->b);
                }
            }
        double tv = 0;
        for (size_t k = 0; k + 1 < cuts.size(); ++k) tv += (levels[k + 1] - levels[k]) * 0.5 * (len[k] + len[k + 1]);
        return tv;
    }

private:
    friend LevelSetSolution solve_strictly_convex(ConvexDomain, BoundaryFunction, const SolveOptions&);

    double f_value(double s) const { return (*f_)(s * f_->period() / dom_->perimeter()); }

    std::shared_ptr<const ConvexDomain> dom_;
    std::shared_ptr<const BoundaryFunction> f_;
    SolveOptions opt_;
};

/// The face of the chord arrangement containing the boundary arc through `s_start`.
inline std::vector<Point> face_at(const ConvexDomain& dom, const std::vector<const Chord*>& chords, double s_start) {
    const double P = dom.perimeter();
    const double tol = 1e-12 * P;
    struct End { double s, other_s; Point other; };
    std::vector<End> ends;
    for (const Chord* c : chords) {
        if (c->length() <= dom.eps_geom()) continue;
        ends.push_back({dom.wrap_s(c->sp), dom.wrap_s(c->sq), c->q});
        ends.push_back({dom.wrap_s(c->sq), dom.wrap_s(c->sp), c->p});
    }
    std::vector<Point> poly;
    auto walk = [&](double from, double gap) {
        for (const auto& piece : split_arc(dom, from, from + gap))
            if (piece.s1 < from + gap - tol) poly.push_back(dom.point_at(piece.s1));
    };
    if (ends.empty()) {
        for (int i = 0; i < dom.size(); ++i) poly.push_back(dom.vertex(i));
        return poly;
    }
    s_start = dom.wrap_s(s_start);
    double s = s_start;
    poly.push_back(dom.point_at(s));
    for (int step = 0; step <= static_cast<int>(ends.size()); ++step) {
        double gap = P + 1;
        for (const auto& e : ends) {
            const double g = dom.ccw_gap(s, e.s);
            if (g > tol && g < gap) gap = g;
        }
        if (step > 0 && dom.ccw_gap(s, s_start) < gap) {
            walk(s, dom.ccw_gap(s, s_start));
            return poly;
        }
        walk(s, gap);
        const double s_next = dom.wrap_s(s + gap);
        poly.push_back(dom.point_at(s_next));
        // sharpest left turn: the chord whose far end lies closest behind
        const End* pick = nullptr;
        double back = P + 1;
        for (const auto& e : ends) {
            if (std::min(dom.ccw_gap(e.s, s_next), dom.ccw_gap(s_next, e.s)) > tol) continue;
            const double g = dom.ccw_gap(e.other_s, s_next);
            if (g > tol && g < back) {
                back = g;
                pick = &e;
            }
        }
        if (!pick) break;
        s = pick->other_s;
        poly.push_back(pick->other);
    }
    return poly;
}

inline double polygon_area(const std::vector<Point>& p) {
    double a = 0;
    for (size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * a;
}

inline Point polygon_centroid(const std::vector<Point>& p) {
    double a = 0;
    Point c{0, 0};
    for (size_t i = 0; i < p.size(); ++i) {
        const Point &u = p[i], &v = p[(i + 1) % p.size()];
        const double w = cross(u, v);
        a += w;
        c += w * (u + v);
    }
    return a != 0 ? c / (3 * a) : p.front();
}

/// Least gradient solution on a strictly convex domain by minimal chord pairings per level.
inline LevelSetSolution solve_strictly_convex(ConvexDomain domain, BoundaryFunction data, const SolveOptions& opt) {
    LevelSetSolution sol;
    sol.dom_ = std::make_shared<const ConvexDomain>(std::move(domain));
    sol.f_ = std::make_shared<const BoundaryFunction>(std::move(data));
    sol.opt_ = opt;
    const auto& dom = *sol.dom_;
    const auto& f = *sol.f_;
    if (!dom.flat_parts().empty())
        throw Error(ErrorKind::NotStrictlyConvex, "solver needs a domain without flat parts");
    if (std::abs(f.period() - dom.perimeter()) > 1e-6 * dom.perimeter())
        throw Error(ErrorKind::BadInput, "data period does not match the domain perimeter");
    if (opt.levels < 2 && opt.grid.empty()) throw Error(ErrorKind::BadInput, "at least two levels are needed");

    sol.levels = opt.grid.empty() ? level_grid(f, opt.levels) : opt.grid;
    std::sort(sol.levels.begin(), sol.levels.end());
    const int K = static_cast<int>(sol.levels.size());
    sol.cuts.resize(K);
    parallel_for(K, [&](int k) { sol.cuts[k] = cut_level(dom, f, sol.levels[k]); });

    const double eps = dom.tolerances().geom_rel;
    for (int k = K - 2; k >= 0; --k) {
        if (!chords_cross(sol.cuts[k].chords, sol.cuts[k + 1].chords, eps)) continue;
        std::vector<const Chord*> avoid;
        for (const auto& c : sol.cuts[k + 1].chords) avoid.push_back(&c);
        try {
            sol.cuts[k] = cut_level(dom, f, sol.levels[k], avoid);
        } catch (const Error&) {
            throw Error(ErrorKind::NonNestedLevels, "level " + std::to_string(sol.levels[k]) +
                                                        " cannot avoid the chords of the level above");
        }
    }

    // fat regions: faces between a plateau level e and e + ε_val that touch the plateau
    const double ev = f.eps_val();
    for (const auto& g : f.segments()) {
        if (std::abs(g.v1 - g.v0) > ev || g.s1 - g.s0 <= f.knot_tol()) continue;
        const double e = 0.5 * (g.v0 + g.v1);
        auto it = std::lower_bound(sol.levels.begin(), sol.levels.end(), e - 1e-13 * std::max(f.range(), 1e-300));
        if (it == sol.levels.end()) continue;
        const int k = static_cast<int>(it - sol.levels.begin());
        std::vector<const Chord*> cs;
        for (const auto& c : sol.cuts[k].chords) cs.push_back(&c);
        if (k + 1 < K)
            for (const auto& c : sol.cuts[k + 1].chords) cs.push_back(&c);
        const double sc = dom.perimeter() / f.period();
        auto poly = face_at(dom, cs, 0.5 * (g.s0 + g.s1) * sc);
        // plateau pieces of one face trace the same region from different starting points
        const double area = polygon_area(poly), tol = 1e-9 * dom.diameter() * dom.diameter();
        const bool seen = std::any_of(sol.fat_regions.begin(), sol.fat_regions.end(), [&](const FatRegion& r) {
            return std::abs(r.value - e) <= ev && std::abs(polygon_area(r.polygon) - area) <= tol &&
                   dist(polygon_centroid(r.polygon), polygon_centroid(poly)) <= 1e-9 * dom.diameter();
        });
        if (!seen && std::abs(area) > tol)
            sol.fat_regions.push_back({std::move(poly), e});
    }

    auto self = std::make_shared<LevelSetSolution>(sol);
    sol.evaluator = [self](const Point& x) { return self->level_value(x); };
    return sol;
}

}  // namespace lgk
