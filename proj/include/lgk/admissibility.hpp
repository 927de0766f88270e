#pragma once

// Admissibility conditions #1 (monotone data on a flat part, with the one-sided variants for
// discontinuous data) and #2 (the hump inequality with witnesses off the flat part).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lgk/boundary_data.hpp"
#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"

namespace lgk {

enum class Condition { C1Continuous, C1DiscI, C1DiscII, C1DiscIII, C2, None };
enum class Verdict { Pass, BoundaryCase, Fail };

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::C1Continuous: return "#1-continuous";
        case Condition::C1DiscI: return "#1-disc(i)";
        case Condition::C1DiscII: return "#1-disc(ii)";
        case Condition::C1DiscIII: return "#1-disc(iii)";
        case Condition::C2: return "#2";
        case Condition::None: return "none";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::BoundaryCase: return "boundary-case";
        case Verdict::Fail: return "fail";
    }
    return "?";
}

inline Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

struct MonotoneResult {
    bool monotone = false;
    int direction = 0;          // +1 nondecreasing, −1 nonincreasing, 0 constant
    std::optional<double> breakpoint;  // arclength where both directions have failed
};

/// Monotonicity of the sequence of one-sided limits of f along the unrolled arc [s0, s1].
inline MonotoneResult monotone_on(const BoundaryFunction& f, double s0, double s1) {
    const double eps = f.eps_val();
    MonotoneResult r;
    bool up = true, down = true;
    bool has_prev = false;
    double prev = 0;
    auto feed = [&](double v, double s) {
        if (has_prev) {
            if (v < prev - eps) up = false;
            if (v > prev + eps) down = false;
            if (!up && !down && !r.breakpoint) r.breakpoint = s;
        }
        prev = v;
        has_prev = true;
    };
    for (const auto& g : f.arc(s0, s1)) {
        feed(g.v0, g.s0);
        feed(g.v1, g.s1);
    }
    r.monotone = up || down;
    r.direction = up && down ? 0 : (up ? 1 : -1);
    return r;
}

struct Condition1Result {
    Verdict verdict = Verdict::Fail;
    Condition variant = Condition::None;
    std::optional<double> eps;     // extension radius for (ii) and (iii)
    std::optional<Point> x0;       // the endpoint extended in (ii)
    std::optional<double> breakpoint;
    std::string reason;
};

inline Condition1Result check_condition1_continuous(const BoundaryFunction& f, const FlatPart& fp) {
    Condition1Result r;
    auto m = monotone_on(f, fp.s_a, fp.s_b);
    r.breakpoint = m.breakpoint;
    if (m.monotone) {
        r.verdict = Verdict::Pass;
        r.variant = Condition::C1Continuous;
    } else {
        r.reason = "f is not monotone on the flat part";
    }
    return r;
}

inline Condition1Result check_condition1_discontinuous(const BoundaryFunction& f, const FlatPart& fp) {
    auto m = monotone_on(f, fp.s_a, fp.s_b);
    if (!m.monotone)
        throw Error(ErrorKind::NotMonotoneOnFlat, "flat part " + std::to_string(fp.id) + " breaks monotonicity at s=" +
                                                      std::to_string(m.breakpoint.value_or(fp.s_a)));
    Condition1Result r;
    const bool cont_l = !f.jump_at(fp.s_a);
    const bool cont_r = !f.jump_at(fp.s_b);
    if (cont_l && cont_r) {
        r.verdict = Verdict::Pass;
        r.variant = Condition::C1DiscI;
        return r;
    }
    const double len = fp.length();
    auto search = [&](double ext_l, double ext_r) -> std::optional<double> {
        for (int j = 1; j <= 20; ++j) {
            const double e = len * std::ldexp(1.0, -j);
            if (monotone_on(f, fp.s_a - ext_l * e, fp.s_b + ext_r * e).monotone) return e;
        }
        return std::nullopt;
    };
    if (cont_r) {
        if (auto e = search(1, 0)) {
            r.verdict = Verdict::Pass;
            r.variant = Condition::C1DiscII;
            r.eps = e;
            r.x0 = fp.p_l;
            return r;
        }
    }
    if (cont_l) {
        if (auto e = search(0, 1)) {
            r.verdict = Verdict::Pass;
            r.variant = Condition::C1DiscII;
            r.eps = e;
            r.x0 = fp.p_r;
            return r;
        }
    }
    if (auto e = search(1, 1)) {
        r.verdict = Verdict::Pass;
        r.variant = Condition::C1DiscIII;
        r.eps = e;
        return r;
    }
    // certificate: where the extension across a discontinuous end breaks monotonicity
    const double e = len * std::ldexp(1.0, -20);
    auto mm = monotone_on(f, fp.s_a - (cont_l ? 0 : e), fp.s_b + (cont_r ? 0 : e));
    r.breakpoint = mm.breakpoint;
    r.reason = "no monotone extension across the discontinuous endpoint(s)";
    return r;
}

struct HumpCheck {
    Hump hump;
    double d_a = std::numeric_limits<double>::infinity();
    double d_b = std::numeric_limits<double>::infinity();
    std::optional<Point> y, z;
    bool y_off_l = false, z_off_l = false;
    bool witnesses_off_l = false;
    double lhs = std::numeric_limits<double>::infinity();  // d_a + d_b
    double rhs = 0;                                         // |a − b|
    Verdict verdict = Verdict::Fail;
    std::string reason;
};

namespace detail {

struct PreimagePiece {
    double s0, s1;  // unrolled arclength, s0 <= s1
    int side_edge;  // edge that owns the piece (decides on-ℓ membership for corner points)
};

/// Closure of f^{-1}(e) outside the hump arc (ha, hb), piece by piece.
inline std::vector<PreimagePiece> preimage_outside(const BoundaryFunction& f, const ConvexDomain& dom, double e,
                                                   double ha, double hb) {
    std::vector<PreimagePiece> out;
    const double eps = f.eps_val();
    const double P = f.period();
    const double stol = f.knot_tol();
    for (const auto& g : f.arc(hb, ha + P)) {
        const bool c0 = std::abs(g.v0 - e) <= eps, c1 = std::abs(g.v1 - e) <= eps;
        const int inner = dom.edge_at(0.5 * (g.s0 + g.s1));
        if (c0 && c1) {
            out.push_back({g.s0, g.s1, inner});
            continue;
        }
        // f only approaches e at the hump's own endpoints; those are not preimage points
        if (c0 && std::abs(g.s0 - hb) > stol) out.push_back({g.s0, g.s0, dom.edge_at(g.s0 + stol)});
        if (c1 && std::abs(g.s1 - (ha + P)) > stol) out.push_back({g.s1, g.s1, dom.edge_at(g.s1 - stol)});
        if (!c0 && !c1 && (g.v0 - e) * (g.v1 - e) < 0) {
            const double t = (e - g.v0) / (g.v1 - g.v0);
            const double s = g.s0 + t * (g.s1 - g.s0);
            out.push_back({s, s, dom.edge_at(s)});
        }
    }
    return out;
}

struct Witness {
    double d = std::numeric_limits<double>::infinity();
    std::optional<Point> p;
    bool off_l = false;
};

inline Witness nearest_witness(const ConvexDomain& dom, const std::vector<PreimagePiece>& pre, const Point& x,
                               int flat_id) {
    Witness w;
    const double tie = 1e-12 * dom.diameter();
    for (const auto& pc : pre) {
        std::vector<std::pair<ArcNearest, int>> cands;
        if (pc.s1 - pc.s0 <= 0) {
            const Point q = dom.point_at(pc.s0);
            cands.push_back({{dist(x, q), q, dom.wrap_s(pc.s0), pc.side_edge}, pc.side_edge});
        } else {
            for (const auto& sub : split_arc(dom, pc.s0, pc.s1)) {
                auto a = nearest_on_arc(dom, x, sub.s0, sub.s1);
                cands.push_back({a, sub.edge});
            }
        }
        for (auto& [a, edge] : cands) {
            const bool off = dom.flat_part_of_edge(edge) != flat_id;
            if (a.distance < w.d - tie || (a.distance <= w.d + tie && off && !w.off_l)) {
                w.d = a.distance;
                w.p = a.point;
                w.off_l = off;
            }
        }
    }
    return w;
}

}  // namespace detail

/// Evaluates the hump inequality d_a + d_b < |a − b| with the witnesses' position relative to ℓ.
inline HumpCheck check_condition2(const BoundaryFunction& f, const ConvexDomain& dom, const Hump& h) {
    HumpCheck c;
    c.hump = h;
    c.rhs = h.length();
    const auto pre = detail::preimage_outside(f, dom, h.value, h.s_a, h.s_b);
    const auto wa = detail::nearest_witness(dom, pre, h.a, h.flat_part);
    const auto wb = detail::nearest_witness(dom, pre, h.b, h.flat_part);
    c.d_a = wa.d;
    c.d_b = wb.d;
    c.y = wa.p;
    c.z = wb.p;
    c.y_off_l = wa.off_l;
    c.z_off_l = wb.off_l;
    c.witnesses_off_l = wa.off_l && wb.off_l;
    c.lhs = c.d_a + c.d_b;
    const double tol = 1e-9 * dom.diameter();
    if (!std::isfinite(c.lhs)) {
        c.verdict = Verdict::Fail;
        c.reason = "NoPreimage: the hump value is not attained elsewhere on the boundary";
    } else if (!c.witnesses_off_l) {
        c.verdict = Verdict::Fail;
        c.reason = "a nearest witness lies on the flat part";
    } else if (c.lhs <= c.rhs - tol) {
        c.verdict = Verdict::Pass;
    } else if (c.lhs <= c.rhs + tol) {
        c.verdict = Verdict::BoundaryCase;
        c.reason = "equality in the hump inequality: solvable only as a limit of admissible data";
    } else {
        c.verdict = Verdict::Fail;
        c.reason = "d_a + d_b exceeds |a - b|";
    }
    return c;
}

/// Interior turning points of f on ℓ that are single points (strict local extrema, jumps included).
inline std::vector<double> strict_extrema(const BoundaryFunction& f, const FlatPart& fp) {
    const double eps = f.eps_val();
    std::vector<std::pair<double, double>> pts;  // (s, value), consecutive duplicates merged
    for (const auto& g : f.arc(fp.s_a, fp.s_b)) {
        for (auto [s, v] : {std::pair{g.s0, g.v0}, std::pair{g.s1, g.v1}}) {
            if (!pts.empty() && std::abs(pts.back().second - v) <= eps && std::abs(pts.back().first - s) <= f.knot_tol())
                continue;
            pts.push_back({s, v});
        }
    }
    std::vector<double> out;
    // compress into runs of equal value, remember their arclength extent
    struct Run { double s0, s1, v; };
    std::vector<Run> runs;
    for (auto [s, v] : pts) {
        if (!runs.empty() && std::abs(runs.back().v - v) <= eps) runs.back().s1 = s;
        else runs.push_back({s, s, v});
    }
    for (size_t i = 1; i + 1 < runs.size(); ++i) {
        const double dl = runs[i].v - runs[i - 1].v, dr = runs[i + 1].v - runs[i].v;
        if (dl * dr < 0 && runs[i].s1 - runs[i].s0 <= f.knot_tol()) out.push_back(runs[i].s0);
    }
    return out;
}

struct FlatPartReport {
    int flat_part = -1;
    Condition condition = Condition::None;
    Verdict verdict = Verdict::Fail;
    bool monotone = false;
    Condition1Result c1;
    std::vector<HumpCheck> humps;
    std::vector<double> strict_extrema;
    std::string certificate;
};

struct AdmissibilityReport {
    std::vector<FlatPartReport> parts;
    Verdict global = Verdict::Pass;
    bool admissible() const { return global != Verdict::Fail; }
};

inline AdmissibilityReport check_admissibility(const BoundaryFunction& f, const ConvexDomain& dom) {
    AdmissibilityReport rep;
    const auto inv = detect_humps(f, dom);
    for (const auto& fp : dom.flat_parts()) {
        FlatPartReport pr;
        pr.flat_part = fp.id;
        const auto mono = monotone_on(f, fp.s_a, fp.s_b);
        pr.monotone = mono.monotone;
        std::vector<Hump> humps;
        for (const auto& h : inv.humps)
            if (h.flat_part == fp.id) humps.push_back(h);

        auto run_c2 = [&]() {
            Verdict v = Verdict::Pass;
            for (const auto& h : humps) {
                pr.humps.push_back(check_condition2(f, dom, h));
                v = worst(v, pr.humps.back().verdict);
            }
            return v;
        };

        if (mono.monotone) {
            pr.c1 = f.continuous() ? check_condition1_continuous(f, fp) : check_condition1_discontinuous(f, fp);
            if (pr.c1.verdict == Verdict::Pass) {
                pr.condition = pr.c1.variant;
                pr.verdict = Verdict::Pass;
            } else if (!humps.empty()) {
                pr.condition = Condition::C2;
                pr.verdict = run_c2();
                pr.certificate = "#1 fails (" + pr.c1.reason + ") and #2 is checked on the plateaus";
            } else {
                pr.verdict = Verdict::Fail;
                pr.certificate = "#1 fails: " + pr.c1.reason;
                if (pr.c1.breakpoint) pr.certificate += " (breakpoint s=" + std::to_string(*pr.c1.breakpoint) + ")";
            }
        } else {
            pr.condition = Condition::C2;
            pr.c1.reason = "f is not monotone on the flat part";
            pr.c1.breakpoint = mono.breakpoint;
            pr.strict_extrema = strict_extrema(f, fp);
            pr.verdict = run_c2();
            if (!pr.strict_extrema.empty()) {
                pr.verdict = Verdict::Fail;
                pr.certificate = "strict local extremum at s=" + std::to_string(pr.strict_extrema.front());
            }
        }
        if (pr.certificate.empty() && pr.verdict != Verdict::Pass)
            for (const auto& hc : pr.humps)
                if (hc.verdict != Verdict::Pass) {
                    pr.certificate = hc.reason;
                    break;
                }
        rep.global = worst(rep.global, pr.verdict);
        rep.parts.push_back(std::move(pr));
    }
    return rep;
}

struct StructuralDiagnostics {
    std::vector<std::string> messages;
    bool contradiction = false;
    bool one_sided = true;
};

namespace detail {

inline bool segments_touch(const Segment& s, const Segment& t, double eps, Point& at) {
    const double l1 = s.length(), l2 = t.length();
    if (l1 <= eps || l2 <= eps) return false;
    const double o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
    const double o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
    if ((o1 > eps * l1 && o2 > eps * l1) || (o1 < -eps * l1 && o2 < -eps * l1)) return false;
    if ((o3 > eps * l2 && o4 > eps * l2) || (o3 < -eps * l2 && o4 < -eps * l2)) return false;
    auto p = line_intersection(s.a, s.b, t.a, t.b);
    if (!p) return false;
    at = *p;
    return true;
}

}  // namespace detail

/// Consequences that admissible data must satisfy on obtuse-ended flat parts and near a marked
/// accumulation vertex. A violation signals inconsistent input, not a solver failure.
inline StructuralDiagnostics structural_checks(const BoundaryFunction& f, const ConvexDomain& dom,
                                               const AdmissibilityReport& rep,
                                               std::optional<double> rho = std::nullopt) {
    StructuralDiagnostics out;
    const double eps = dom.eps_geom();
    (void)f;
    for (const auto& pr : rep.parts) {
        const auto& fp = dom.flat_parts()[pr.flat_part];
        if (!(fp.obtuse_l && fp.obtuse_r) || pr.condition != Condition::C2) continue;
        int passing = 0;
        for (const auto& hc : pr.humps)
            if (hc.verdict != Verdict::Fail) ++passing;
        if (passing > 1) {
            out.contradiction = true;
            out.messages.push_back("flat part " + std::to_string(fp.id) + " has obtuse ends and " +
                                   std::to_string(passing) + " admissible humps");
        }
        const auto strip = strip_of(dom, fp);
        for (const auto* side : {&strip.s_l, &strip.s_r}) {
            std::vector<Point> hits;
            for (const auto& hc : pr.humps) {
                if (hc.verdict == Verdict::Fail) continue;
                for (auto [p, w] : {std::pair{hc.hump.a, hc.y}, std::pair{hc.hump.b, hc.z}}) {
                    if (!w) continue;
                    Point at;
                    if (detail::segments_touch({p, *w}, *side, 1e-12, at)) {
                        bool seen = false;
                        for (const auto& q : hits) seen = seen || dist(q, at) <= 1e3 * eps;
                        if (!seen) hits.push_back(at);
                    }
                }
            }
            if (hits.size() > 1) {
                out.contradiction = true;
                out.messages.push_back("witness segments meet a strip side of flat part " + std::to_string(fp.id) +
                                       " at " + std::to_string(hits.size()) + " points");
            }
        }
    }
    const auto fam = accumulation_family(dom);
    if (fam.vertex >= 0) {
        out.one_sided = fam.one_sided;
        if (!fam.one_sided) out.messages.push_back("flat parts accumulate at p_0 from both sides");
        const Point p0 = dom.vertex(fam.vertex);
        const double interior = dom.corner_angles()[fam.vertex];
        const bool obtuse = interior >= std::numbers::pi / 2 + dom.tolerances().angle;
        if (obtuse && !fam.parts.empty()) {
            double r = 0;
            if (rho) r = *rho;
            else {
                const auto& far = dom.flat_parts()[fam.parts[fam.parts.size() / 2]];
                r = std::max(dist(far.p_l, p0), dist(far.p_r, p0));
            }
            for (int id : fam.parts) {
                const auto& fp = dom.flat_parts()[id];
                if (std::max(dist(fp.p_l, p0), dist(fp.p_r, p0)) > r) continue;
                const auto strip = strip_of(dom, fp);
                for (const auto& pr : rep.parts) {
                    if (pr.flat_part != id) continue;
                    for (const auto& hc : pr.humps) {
                        if (hc.verdict == Verdict::Fail) continue;
                        Point at;
                        bool hit_a = false, hit_b = false;
                        for (const auto* side : {&strip.s_l, &strip.s_r}) {
                            if (hc.y) hit_a = hit_a || detail::segments_touch({hc.hump.a, *hc.y}, *side, 1e-12, at);
                            if (hc.z) hit_b = hit_b || detail::segments_touch({hc.hump.b, *hc.z}, *side, 1e-12, at);
                        }
                        if (!hit_a || !hit_b) {
                            out.contradiction = true;
                            out.messages.push_back("hump on flat part " + std::to_string(id) +
                                                   " near p_0 has a witness segment inside its strip");
                        }
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace lgk
