#pragma once

// Humps accumulating at an endpoint of a flat part: the region is cut into triangles T_i and
// trapezoids Q_i along segments [x*_i, y*_i] where f takes the hump value, each Q_i is solved with
// its cut segments pinned, and the pieces are glued.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lgk/admissibility.hpp"
#include "lgk/solver.hpp"

namespace lgk {

struct HumpAssemblyOptions {
    ContinuousOptions piece;  // options for every Q_i
    int mismatch_samples = 50;
    double mismatch_offset_rel = 1e-6;  // probe offset from a cut, relative to its length
};

/// One leg of a sub-domain boundary: an arc of ∂Ω (CCW from s0 to s1) or a straight cut at a fixed value.
struct Leg {
    bool cut = false;
    double s0 = 0, s1 = 0;
    double value = 0;
};

/// A sub-domain scaled to unit diameter, with the map from the original plane.
struct ScaledPiece {
    ConvexDomain domain;
    BoundaryFunction data;
    Point center;
    double scale = 1;
    Point to_local(const Point& p) const { return (p - center) / scale; }
};

namespace detail {

inline std::vector<LinearSeg> wrap_into_period(const std::vector<LinearSeg>& in, double P) {
    std::vector<LinearSeg> out;
    for (auto x : in) {
        const double k = std::floor(x.s0 / P);
        x.s0 -= k * P;
        x.s1 -= k * P;
        if (x.s1 <= P * (1 + 1e-15)) {
            out.push_back(x);
            continue;
        }
        const double vm = x.at(P);
        out.push_back({x.s0, P, x.v0, vm});
        out.push_back({0, x.s1 - P, vm, x.v1});
    }
    for (auto& x : out) x.s1 = std::min(x.s1, P);
    std::erase_if(out, [](const LinearSeg& x) { return x.s1 <= x.s0; });
    return out;
}

}  // namespace detail

/// Builds the sub-domain bounded by `legs` (in CCW order) with f on the arcs and the cut values on the cuts.
inline ScaledPiece build_piece(const ConvexDomain& dom, const BoundaryFunction& f, const std::vector<Leg>& legs) {
    const double ratio = f.period() / dom.perimeter();
    std::vector<Point> pts;
    std::vector<bool> smooth;
    for (size_t k = 0; k < legs.size(); ++k) {
        const auto& g = legs[k];
        if (g.cut) continue;
        const Point a = dom.point_at(g.s0);
        if (pts.empty() || dist(pts.back(), a) > dom.eps_geom()) {
            pts.push_back(a);
            smooth.push_back(dom.edge_smooth(dom.edge_at(g.s0)));
        }
        for (const auto& pc : split_arc(dom, g.s0, g.s1)) {
            const Point q = dom.point_at(pc.s1);
            if (pc.s1 >= g.s1 - dom.eps_geom()) break;
            pts.push_back(q);
            smooth.push_back(dom.edge_smooth(dom.edge_at(pc.s1)));
        }
        pts.push_back(dom.point_at(g.s1));
        smooth.push_back(false);  // the cut that follows
    }
    ScaledPiece sp;
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    }
    sp.center = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
    double diam = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, dist(pts[i], pts[j]));
    sp.scale = diam;
    std::vector<Point> local;
    for (const auto& p : pts) local.push_back(sp.to_local(p));
    sp.domain = build_domain(local, smooth, dom.tolerances());

    // data: walk the legs in local arclength, starting at the first arc's start point
    std::vector<LinearSeg> segs;
    const auto& first = *std::find_if(legs.begin(), legs.end(), [](const Leg& g) { return !g.cut; });
    double S = sp.domain.arclength_of(sp.to_local(dom.point_at(first.s0)));
    const auto start = std::find_if(legs.begin(), legs.end(), [](const Leg& g) { return !g.cut; }) - legs.begin();
    for (size_t m = 0; m < legs.size(); ++m) {
        const auto& g = legs[(start + m) % legs.size()];
        if (g.cut) {
            const auto& prev = legs[(start + m + legs.size() - 1) % legs.size()];
            const auto& next = legs[(start + m + 1) % legs.size()];
            const double len = dist(dom.point_at(prev.s1), dom.point_at(next.s0)) / diam;
            segs.push_back({S, S + len, g.value, g.value});
            S += len;
            continue;
        }
        for (const auto& x : f.arc(g.s0 * ratio, g.s1 * ratio)) {
            const double a = S + (x.s0 / ratio - g.s0) / diam, b = S + (x.s1 / ratio - g.s0) / diam;
            if (b > a) segs.push_back({a, b, x.v0, x.v1});
        }
        S += (g.s1 - g.s0) / diam;
    }
    const double P = sp.domain.perimeter();
    // absorb the rounding between the summed leg lengths and the polygon perimeter
    const double S0 = segs.front().s0, k = P / (S - S0);
    for (auto& x : segs) x.s0 = S0 + (x.s0 - S0) * k, x.s1 = S0 + (x.s1 - S0) * k;
    auto wrapped = detail::wrap_into_period(segs, P);
    std::sort(wrapped.begin(), wrapped.end(), [](auto& a, auto& b) { return a.s0 < b.s0; });
    std::erase_if(wrapped, [&](const LinearSeg& x) { return x.s1 - x.s0 < 1e-12 * P; });
    wrapped.front().s0 = 0;
    for (size_t i = 1; i < wrapped.size(); ++i) wrapped[i].s0 = wrapped[i - 1].s1;
    wrapped.back().s1 = P;
    sp.data = BoundaryFunction::from_segments(std::move(wrapped), P);
    return sp;
}

struct HumpAssembly {
    Point apex;
    std::vector<Point> x_star, y_star;
    std::vector<double> values;  // f(x*_i) = f(y*_i)
    std::vector<ScaledPiece> pieces;            // Q_0, ..., Q_{K−1}
    std::vector<LevelSetSolution> solutions;    // v_k on the scaled Q_k
    std::vector<std::vector<int>> n_used;
    std::vector<double> cut_mismatch;           // per cut, max one-sided difference
    double max_cut_mismatch = 0;

    /// u_K = Σ v_k χ_{Q_k} + f(x*_K) χ_{T_K}.
    double operator()(const Point& p) const {
        for (size_t k = 0; k < pieces.size(); ++k) {
            const Point q = pieces[k].to_local(p);
            if (pieces[k].domain.contains(q, 1e-12)) return solutions[k](q);
        }
        return values.back();
    }
};

/// Assembles the triangle/trapezoid solution for the humps of the flat part that carries the most
/// of them, truncated after K_trunc humps counted from the one farthest from the accumulation point.
inline HumpAssembly solve_infinite_humps(const ConvexDomain& dom, const BoundaryFunction& f, int K_trunc,
                                         const HumpAssemblyOptions& opt = {}) {
    if (K_trunc < 1) throw Error(ErrorKind::BadInput, "K_trunc must be >= 1");
    const auto inv = detect_humps(f, dom);
    std::vector<int> count(dom.flat_parts().size(), 0);
    for (const auto& h : inv.humps) ++count[h.flat_part];
    const auto best = std::max_element(count.begin(), count.end());
    if (best == count.end() || *best == 0) throw Error(ErrorKind::NoMatchedPair, "no humps");
    const int lid = static_cast<int>(best - count.begin());
    const auto& fl = dom.flat_parts()[lid];
    std::vector<Hump> humps;
    for (const auto& h : inv.humps)
        if (h.flat_part == lid) humps.push_back(h);
    // the accumulation point is the end of ℓ that no hump touches, else the end nearest to the shortest hump
    const double touch = 1e-9 * dom.diameter();
    bool touches_l = false, touches_r = false;
    for (const auto& h : humps) {
        touches_l = touches_l || dist(h.a, fl.p_l) <= touch;
        touches_r = touches_r || dist(h.b, fl.p_r) <= touch;
    }
    const auto shortest = *std::min_element(humps.begin(), humps.end(), [](auto& a, auto& b) { return a.length() < b.length(); });
    const bool at_left = touches_l != touches_r ? touches_r : dist(shortest.a, fl.p_l) < dist(shortest.b, fl.p_r);
    HumpAssembly out;
    out.apex = at_left ? fl.p_l : fl.p_r;
    const double s_apex = at_left ? fl.s_a : fl.s_b;
    const double Pf = f.period(), ratio = Pf / dom.perimeter();
    if (auto j = f.jump_at(s_apex * ratio))
        throw Error(ErrorKind::DiscontinuousAtAccumulation, "f jumps by " + std::to_string(j->size()) + " at the accumulation point");
    std::sort(humps.begin(), humps.end(), [&](auto& a, auto& b) {
        return dist(a.a, out.apex) + dist(a.b, out.apex) > dist(b.a, out.apex) + dist(b.b, out.apex);
    });
    const int K = std::min<int>(K_trunc, static_cast<int>(humps.size()));

    // matched points: x*_i mid-hump, y*_i the point of f^{-1}(e_i) nearest to x*_i on the witness arc
    // [y_i, z_i] (the one not containing the hump)
    const double P = dom.perimeter();
    if (std::abs(Pf - P) > 1e-9 * P) throw Error(ErrorKind::BadInput, "data period differs from the perimeter");
    std::vector<double> sx, sy;
    for (int i = 0; i < K; ++i) {
        const auto& h = humps[i];
        const auto chk = check_condition2(f, dom, h);
        if (!chk.y || !chk.z) throw Error(ErrorKind::NoMatchedPair, "hump " + std::to_string(i + 1) + " has no witnesses");
        const double xs = 0.5 * (h.s_a + h.s_b);
        const Point xp = dom.point_at(xs);
        double lo = dom.arclength_of(*chk.y), hi = dom.arclength_of(*chk.z);
        if (hi < lo) std::swap(lo, hi);
        if (dom.wrap_s(xs) > lo && dom.wrap_s(xs) < hi) std::swap(lo, hi), hi += P;
        const double tol = 1e-9 * P;
        std::optional<double> ys;
        double best = INFINITY;
        for (const auto& pc : detail::preimage_outside(f, dom, h.value, h.s_a, h.s_b)) {
            for (double shift : {-P, 0.0, P}) {
                const double a = std::max(pc.s0 + shift, lo - tol), b = std::min(pc.s1 + shift, hi + tol);
                if (b < a) continue;
                const auto nr = nearest_on_arc(dom, xp, a, std::max(a, b));
                if (nr.distance < best) {
                    best = nr.distance;
                    ys = nr.s;
                }
            }
        }
        if (!ys) throw Error(ErrorKind::NoMatchedPair, "hump " + std::to_string(i + 1) + ": no point with f = e on the witness arc");
        if (std::abs(f(*ys) - h.value) > 10 * f.eps_val())
            throw Error(ErrorKind::NoMatchedPair, "f(y*) = " + std::to_string(f(*ys)) + " differs from the hump value " +
                                                       std::to_string(h.value));
        sx.push_back(xs);
        sy.push_back(*ys);
        out.x_star.push_back(xp);
        out.y_star.push_back(dom.point_at(*ys));
        out.values.push_back(h.value);
    }
    // unrolled coordinates: x*'s on ℓ, y*'s on the other side of the apex, both measured away from it
    auto away = [&](double s, int dir) { return dom.wrap_s(dir * (s - s_apex)); };
    const int dx = at_left ? +1 : -1;
    for (int i = 0; i + 1 < K; ++i)
        if (!(away(sx[i], dx) > away(sx[i + 1], dx) && away(sy[i], -dx) > away(sy[i + 1], -dx)))
            throw Error(ErrorKind::NoMatchedPair, "cut segments " + std::to_string(i + 1) + " and " + std::to_string(i + 2) + " cross");

    auto ccw_arc = [&](double s0, double s1) {
        if (s1 <= s0) s1 += P;
        return Leg{false, s0, s1, 0};
    };
    auto cut = [&](double v) { return Leg{true, 0, 0, v}; };
    // Q_0 = Ω ∖ T_1, then Q_i between cuts i and i+1
    std::vector<std::vector<Leg>> legs;
    if (at_left) {
        legs.push_back({ccw_arc(sx[0], sy[0]), cut(out.values[0])});
        for (int i = 0; i + 1 < K; ++i)
            legs.push_back({ccw_arc(sx[i + 1], sx[i]), cut(out.values[i]), ccw_arc(sy[i], sy[i + 1]), cut(out.values[i + 1])});
    } else {
        legs.push_back({ccw_arc(sy[0], sx[0]), cut(out.values[0])});
        for (int i = 0; i + 1 < K; ++i)
            legs.push_back({ccw_arc(sx[i], sx[i + 1]), cut(out.values[i + 1]), ccw_arc(sy[i + 1], sy[i]), cut(out.values[i])});
    }
    for (size_t k = 0; k < legs.size(); ++k) {
        ContinuousReport rep;
        try {
            out.pieces.push_back(build_piece(dom, f, legs[k]));
            out.solutions.push_back(solve_continuous(out.pieces.back().domain, out.pieces.back().data, opt.piece, &rep));
        } catch (const Error& e) {
            throw Error(e.kind(), "Q_" + std::to_string(k) + ": " + e.what());
        }
        out.n_used.push_back(rep.n_used);
    }

    // gluing: one-sided values across every cut
    for (int i = 0; i < K; ++i) {
        const Point a = out.x_star[i], b = out.y_star[i];
        const double len = dist(a, b);
        Point nrm = perp(unit(b - a));
        const double off = opt.mismatch_offset_rel * len;
        // orient the normal toward Q_{i} (away from the apex)
        if (dot(nrm, 0.5 * (a + b) - out.apex) < 0) nrm = -1.0 * nrm;
        double worst = 0;
        for (int k = 0; k < opt.mismatch_samples; ++k) {
            const Point c = lerp(a, b, (k + 0.5) / opt.mismatch_samples);
            const Point outer = c + off * nrm, inner = c - off * nrm;
            const auto& po = out.pieces[i];
            const double vo = out.solutions[i](po.to_local(outer));
            double vi = out.values[i];
            if (i + 1 < K) {
                const auto& pi = out.pieces[i + 1];
                vi = out.solutions[i + 1](pi.to_local(inner));
            }
            worst = std::max(worst, std::abs(vo - vi));
        }
        out.cut_mismatch.push_back(worst);
        out.max_cut_mismatch = std::max(out.max_cut_mismatch, worst);
    }
    return out;
}

}  // namespace lgk
