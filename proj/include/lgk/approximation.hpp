#pragma once

// Strictly convex outer approximations Ω_n and data lifted onto them.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lgk/boundary_data.hpp"
#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"

namespace lgk {

enum class Surgery { ArcInsert, TangentGraph };

inline const char* to_string(Surgery s) { return s == Surgery::ArcInsert ? "arc-insert" : "tangent-graph"; }

struct SurgeryRecord {
    int flat_part = 0;
    Surgery kind = Surgery::ArcInsert;
    double sagitta = 0;
};

struct ApproxDomain {
    ConvexDomain domain;
    int n = 1;
    std::vector<SurgeryRecord> provenance;
    // arclength on the source boundary for every vertex of `domain`; π_n is affine on each edge
    std::vector<double> source_s;
    double source_perimeter = 0;
};

namespace detail {

struct TaggedPoint {
    Point p;
    double s;  // source arclength, unrolled per point
};

/// Andrew monotone chain; drops collinear points, returns ccw order.
inline std::vector<TaggedPoint> convex_hull(std::vector<TaggedPoint> pts, double eps) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.p.x < b.p.x || (a.p.x == b.p.x && a.p.y < b.p.y);
    });
    const size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<TaggedPoint> h(2 * n);
    size_t k = 0;
    auto turn = [&](const Point& o, const Point& a, const Point& b) {
        return cross(a - o, b - o) / std::max(dist(o, b), 1e-300);
    };
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && turn(h[k - 2].p, h[k - 1].p, pts[i].p) <= eps) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i > 0; --i) {
        while (k >= t && turn(h[k - 2].p, h[k - 1].p, pts[i - 1].p) <= eps) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace detail

/// Ω_n: every flat part replaced by an outward circular arc of sagitta at most 1/(2n), limited at
/// corners so the arc stays inside the neighbours' tangent wedge; the convex hull of the result
/// bridges tangential junctions.
inline ApproxDomain build_strictly_convex(const ConvexDomain& dom, int n, int arc_samples = 48) {
    if (n < 1) throw Error(ErrorKind::BadInput, "n must be >= 1");
    ApproxDomain out;
    out.n = n;
    out.source_perimeter = dom.perimeter();
    const double P = dom.perimeter();
    const double eps = dom.eps_geom();
    std::vector<detail::TaggedPoint> pts;
    std::vector<char> vertex_on_flat(dom.size(), 0);
    for (const auto& fp : dom.flat_parts())
        for (int j = 1; j < fp.edge_count; ++j) vertex_on_flat[dom.wrap(fp.first_edge + j)] = 1;
    for (int i = 0; i < dom.size(); ++i)
        if (!vertex_on_flat[i]) pts.push_back({dom.vertex(i), dom.arclength_at_vertex(i)});

    for (const auto& fp : dom.flat_parts()) {
        const double c = fp.length();
        double theta_max = std::numbers::pi / 2;
        bool tangential = false;
        for (auto [kind, angle] : {std::pair{fp.junction_l, fp.end_angle_l}, std::pair{fp.junction_r, fp.end_angle_r}}) {
            if (kind == JunctionKind::Tangential) {
                tangential = true;
                continue;
            }
            theta_max = std::min(theta_max, 0.5 * (std::numbers::pi - angle));
        }
        const double sag_wedge = 0.5 * c * std::tan(0.5 * theta_max);
        double sag = 0.5 * std::min(1.0 / n, 2 * sag_wedge);
        if (sag <= eps) throw Error(ErrorKind::TangentLineConflict, "no room for an arc on flat part " + std::to_string(fp.id));
        const double R = (0.25 * c * c + sag * sag) / (2 * sag);
        const Point nin = fp.inward_normal();
        std::vector<double> ts;
        for (int j = 1; j < arc_samples; ++j) {
            // uniform in angle along the arc
            const double half = std::asin(std::min(1.0, 0.5 * c / R));
            const double phi = -half + 2 * half * j / arc_samples;
            ts.push_back(0.5 * c + R * std::sin(phi));
        }
        double last = -1;
        for (double t : ts) {
            if (t - last <= 1e-9 * c || t >= c * (1 - 1e-9) || t <= 1e-9 * c) continue;
            last = t;
            const double h = std::sqrt(std::max(0.0, R * R - (t - 0.5 * c) * (t - 0.5 * c))) - (R - sag);
            pts.push_back({fp.p_l + t * fp.direction - h * nin, fp.s_a + t});
        }
        out.provenance.push_back({fp.id, tangential ? Surgery::TangentGraph : Surgery::ArcInsert, sag});
    }

    auto hull = detail::convex_hull(pts, 1e-12 * dom.diameter());
    // rotate so the vertex with the smallest source arclength comes first, then unroll
    for (auto& h : hull) h.s = std::fmod(std::fmod(h.s, P) + P, P);
    const auto first = std::min_element(hull.begin(), hull.end(), [](auto& a, auto& b) { return a.s < b.s; });
    std::rotate(hull.begin(), first, hull.end());
    std::vector<Point> chain;
    for (size_t i = 0; i < hull.size(); ++i) {
        chain.push_back(hull[i].p);
        out.source_s.push_back(hull[i].s);
    }
    for (size_t i = 1; i < out.source_s.size(); ++i)
        if (out.source_s[i] < out.source_s[i - 1]) throw Error(ErrorKind::DegenerateChain, "hull lost the boundary order");
    auto tol = dom.tolerances();
    out.domain = build_domain(chain, std::vector<bool>(chain.size(), true), tol);
    return out;
}

/// f_n on ∂Ω_n: each edge of Ω_n carries f over its source arc, reparametrized affinely.
inline BoundaryFunction lift_data(const BoundaryFunction& f, const ApproxDomain& ap) {
    const auto& d = ap.domain;
    const double Pf = f.period();
    const double ratio = Pf / ap.source_perimeter;
    std::vector<LinearSeg> segs;
    const int m = d.size();
    for (int i = 0; i < m; ++i) {
        const double a = ap.source_s[i] * ratio;
        double b = (i + 1 < m ? ap.source_s[i + 1] : ap.source_s[0] + ap.source_perimeter) * ratio;
        const double s0 = d.arclength_at_vertex(i);
        const double s1 = i + 1 < m ? d.arclength_at_vertex(i + 1) : d.perimeter();
        if (b <= a) {
            const double v = f.right_limit(a);
            segs.push_back({s0, s1, v, v});
            continue;
        }
        auto map = [&](double s) { return s0 + (s - a) / (b - a) * (s1 - s0); };
        for (const auto& g : f.arc(a, b)) {
            const double x0 = map(g.s0), x1 = map(g.s1);
            if (x1 - x0 <= 0) continue;
            segs.push_back({x0, x1, g.v0, g.v1});
        }
    }
    segs.front().s0 = 0;
    segs.back().s1 = d.perimeter();
    return BoundaryFunction::from_segments(std::move(segs), d.perimeter());
}

}  // namespace lgk
