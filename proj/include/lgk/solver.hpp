#pragma once

// Solution pipelines: restriction from Ω_n, limits in a data family, modulus constants.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgk/admissibility.hpp"
#include "lgk/approximation.hpp"
#include "lgk/envelopes.hpp"
#include "lgk/levelset.hpp"

namespace lgk {

struct ModulusConstants {
    double A = 1, B = 1;
};

/// A from parallel and disjoint non-parallel pairs of flat parts, B from pairs meeting at a vertex.
/// With no such pair the defaults are A = 1 and γ = π/2.
inline ModulusConstants modulus_constants(const ConvexDomain& dom) {
    ModulusConstants mc;
    const double diam = dom.diameter();
    mc.B = 1.0 / std::sqrt(diam);
    const auto& fps = dom.flat_parts();
    const double tol = dom.eps_geom();
    for (size_t i = 0; i < fps.size(); ++i)
        for (size_t j = i + 1; j < fps.size(); ++j) {
            const auto &a = fps[i], &b = fps[j];
            const double sin_ab = std::abs(cross(a.direction, b.direction));
            const bool touch = dist(a.p_r, b.p_l) <= tol || dist(b.p_r, a.p_l) <= tol;
            if (touch) {
                mc.B = std::min(mc.B, std::sqrt(std::max(sin_ab, 1e-12) / diam));
            } else if (sin_ab <= dom.tolerances().angle) {
                const double gap = std::abs(dot(b.p_l - a.p_l, a.inward_normal()));
                mc.A = std::min(mc.A, gap / diam);
            } else {
                auto proj_len = [](const FlatPart& p, const FlatPart& onto) {
                    return std::abs(dot(p.p_r - p.p_l, onto.direction));
                };
                const double d1 = std::min(dist_to_segment(a.p_l, b.p_l, b.p_r), dist_to_segment(a.p_r, b.p_l, b.p_r));
                const double d2 = std::min(dist_to_segment(b.p_l, a.p_l, a.p_r), dist_to_segment(b.p_r, a.p_l, a.p_r));
                double sb = 1;
                if (proj_len(a, b) > tol) sb = std::min(sb, d1 / proj_len(a, b));
                if (proj_len(b, a) > tol) sb = std::min(sb, d2 / proj_len(b, a));
                mc.A = std::min(mc.A, sb);
            }
        }
    return mc;
}

/// ω̃(r) = ω(r/A + √r/B).
inline double modulus_bound(const std::function<double(double)>& omega, const ModulusConstants& mc, double r) {
    return omega(r / mc.A + std::sqrt(r) / mc.B);
}

struct ContinuousOptions {
    std::vector<int> n_seq{4, 8, 16, 32};
    int levels = 256;
    double delta_conv_rel = 1e-4;
    int max_n = 16384;  // the sequence keeps doubling up to here when it ends unconverged
    int probe_side = 21;
    bool allow_boundary_case = false;
    bool check_admissibility = true;
};

struct ContinuousReport {
    AdmissibilityReport admissibility;
    std::vector<int> n_used;
    std::vector<double> sup_change;  // between consecutive n on the probe grid
    bool converged = false;
    double delta_conv = 0;
};

/// Interior probe points of a convex domain on a side×side lattice over its bounding box.
inline std::vector<Point> probe_points(const ConvexDomain& dom, int side, double margin_rel = 1e-3) {
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (const auto& v : dom.vertices()) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    std::vector<Point> out;
    const double m = margin_rel * dom.diameter();
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            const Point p{x0 + (x1 - x0) * (i + 0.5) / side, y0 + (y1 - y0) * (j + 0.5) / side};
            if (dom.contains(p, -m)) out.push_back(p);
        }
    return out;
}

/// Continuous data: solve on Ω_n with lifted data for each n and restrict to Ω, until the sup-norm
/// change on a probe grid drops below δ_conv.
inline LevelSetSolution solve_continuous(const ConvexDomain& dom, const BoundaryFunction& f,
                                         const ContinuousOptions& opt = {}, ContinuousReport* report = nullptr) {
    ContinuousReport rep;
    rep.delta_conv = opt.delta_conv_rel * f.range();
    if (!f.continuous()) throw Error(ErrorKind::DiscontinuousData, "solve_continuous needs continuous data");
    if (opt.check_admissibility && !dom.flat_parts().empty()) {
        rep.admissibility = check_admissibility(f, dom);
        const auto v = rep.admissibility.global;
        if (v == Verdict::Fail || (v == Verdict::BoundaryCase && !opt.allow_boundary_case)) {
            std::string why;
            for (const auto& p : rep.admissibility.parts)
                if (p.verdict != Verdict::Pass) why += (why.empty() ? "" : "; ") + p.certificate;
            if (report) *report = rep;
            throw Error(ErrorKind::NotAdmissible, why.empty() ? std::string("data not admissible") : why);
        }
    }
    SolveOptions so;
    so.levels = opt.levels;
    so.grid = level_grid(f, opt.levels);
    const auto mc = modulus_constants(dom);

    auto finish = [&](LevelSetSolution s) {
        s.A = mc.A;
        s.B = mc.B;
        if (report) *report = rep;
        return s;
    };
    if (dom.flat_parts().empty()) {
        rep.converged = true;
        return finish(solve_strictly_convex(dom, f, so));
    }
    if (opt.n_seq.empty()) throw Error(ErrorKind::BadInput, "empty n sequence");
    const auto probes = probe_points(dom, opt.probe_side);
    std::vector<double> prev;
    LevelSetSolution last;
    std::vector<int> seq = opt.n_seq;
    while (seq.back() * 2 <= opt.max_n) seq.push_back(seq.back() * 2);
    for (int n : seq) {
        auto ap = build_strictly_convex(dom, n);
        auto fn = lift_data(f, ap);
        last = solve_strictly_convex(std::move(ap.domain), std::move(fn), so);
        rep.n_used.push_back(n);
        std::vector<double> cur(probes.size());
        parallel_for(static_cast<int>(probes.size()), [&](int i) { cur[i] = last(probes[i]); });
        if (!prev.empty()) {
            double ch = 0;
            for (size_t i = 0; i < cur.size(); ++i) ch = std::max(ch, std::abs(cur[i] - prev[i]));
            rep.sup_change.push_back(ch);
            if (ch <= rep.delta_conv) {
                rep.converged = true;
                break;
            }
        }
        prev = std::move(cur);
    }
    if (!rep.converged) {
        if (report) *report = rep;
        throw Error(ErrorKind::NoConvergence,
                    "sup change " + (rep.sup_change.empty() ? std::string("n/a") : std::to_string(rep.sup_change.back())) +
                        " above " + std::to_string(rep.delta_conv) + " at n = " + std::to_string(rep.n_used.back()));
    }
    return finish(std::move(last));
}

struct SandwichOptions {
    std::vector<int> n_env{16, 32, 64, 128, 256};
    int levels = 256;
    int domain_n = 256;  // Ω_m used for every envelope when Ω has flat parts
    int probe_side = 21;
    int trace_samples = 200;
    double trace_h = 1.0 / 128;
    double comparison_tol_rel = 1e-6;
    bool allow_boundary_case = false;
};

struct TraceSample {
    double s = 0;
    Point p;
    double f = 0, tu = 0, tv = 0;
};

struct SandwichReport {
    AdmissibilityReport admissibility;
    std::vector<int> n_used;
    RepairReport last_repair;
    double max_comparison_violation = 0;  // worst breach of v_n ≤ v_n' ≤ u_n' ≤ u_n on the probe grid
    double max_gap = 0;                   // sup (u − v) on the probe grid
    std::vector<TraceSample> trace;
    double trace_error = 0;
};

struct SandwichSolution {
    LevelSetSolution u, v;  // from h_n and g_n at the largest n
    SandwichReport report;
};

/// Value of the linear fit through (d_i, y_i) at d = 0.
inline double extrapolate_to_zero(std::span<const double> d, std::span<const double> y) {
    const double n = static_cast<double>(d.size());
    double sd = 0, sy = 0, sdd = 0, sdy = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        sd += d[i];
        sy += y[i];
        sdd += d[i] * d[i];
        sdy += d[i] * y[i];
    }
    const double den = n * sdd - sd * sd;
    if (std::abs(den) < 1e-300) return sy / n;
    const double slope = (n * sdy - sd * sy) / den;
    return (sy - slope * sd) / n;
}

/// Inward-normal trace of `u` at arclength s. The values at 2h and 4h are extrapolated linearly to
/// the boundary; 8h is sampled too and the least-squares intercept over all three is returned as
/// `fit`, which differs from `value` where u is not linear along the normal (fans of level lines).
struct NormalTrace {
    double value = 0;      // linear fit over the approach distances 2h, 4h, 8h, taken at 0
    double two_point = 0;  // 2u(2h) − u(4h)
};

/// Whether the inward normal probes at 2h, 4h, 8h from boundary arclength s stay inside Ω.
inline bool normal_probe_fits(const ConvexDomain& dom, double s, double h) {
    const Point p = dom.point_at(s);
    const Point nin = -1.0 * dom.outward_normal_at(s);
    for (double d : {2 * h, 4 * h, 8 * h})
        if (!dom.contains(p + d * nin, -0.5 * h)) return false;
    return true;
}

inline std::optional<NormalTrace> normal_trace(const ConvexDomain& dom, const std::function<double(const Point&)>& u,
                                               double s, double h) {
    if (!normal_probe_fits(dom, s, h)) return std::nullopt;
    const Point p = dom.point_at(s);
    const Point nin = -1.0 * dom.outward_normal_at(s);
    std::array<double, 3> d{2 * h, 4 * h, 8 * h}, y{};
    for (int i = 0; i < 3; ++i) y[i] = u(p + d[i] * nin);
    return NormalTrace{extrapolate_to_zero(d, y), 2 * y[0] - y[1]};
}

/// `count` boundary arclengths (in data parametrization) at continuity points whose normal probes fit,
/// spread evenly; points within `keep_out` of a jump are skipped.
inline std::vector<double> continuity_probes(const ConvexDomain& dom, const BoundaryFunction& f, int count,
                                             double keep_out, double h) {
    const double P = f.period();
    std::vector<double> ss;
    for (int M = count; M <= 64 * count; M += std::max(1, M / 8)) {
        ss.clear();
        for (int k = 0; k < M; ++k) {
            const double s = P * (k + 0.5) / M;
            bool near_jump = false;
            for (const auto& j : f.jumps()) {
                const double d = std::abs(s - j.s);
                if (std::min(d, P - d) < keep_out) near_jump = true;
            }
            if (!near_jump && normal_probe_fits(dom, s * dom.perimeter() / P, h)) ss.push_back(s);
        }
        if (static_cast<int>(ss.size()) >= count) break;
    }
    if (static_cast<int>(ss.size()) <= count) return ss;
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(ss[static_cast<size_t>(i) * ss.size() / count]);
    return out;
}

/// Discontinuous data: monotone envelopes g_n ↑ f and h_n ↓ f, repaired where needed and solved
/// on a common strictly convex domain. The solutions from g_n rise and those from h_n fall with n;
/// both orderings and v ≤ u are checked on the probe grid.
inline SandwichSolution solve_discontinuous(const ConvexDomain& dom, const BoundaryFunction& f,
                                            const SandwichOptions& opt = {}) {
    SandwichSolution out;
    auto& rep = out.report;
    if (!dom.flat_parts().empty()) {
        rep.admissibility = check_admissibility(f, dom);
        const auto v = rep.admissibility.global;
        if (v == Verdict::Fail || (v == Verdict::BoundaryCase && !opt.allow_boundary_case)) {
            std::string why;
            for (const auto& p : rep.admissibility.parts)
                if (p.verdict != Verdict::Pass) why += (why.empty() ? "" : "; ") + p.certificate;
            throw Error(ErrorKind::NotAdmissible, why.empty() ? std::string("data not admissible") : why);
        }
    }
    if (opt.n_env.empty()) throw Error(ErrorKind::BadInput, "empty envelope sequence");
    const auto probes = probe_points(dom, opt.probe_side);
    const double tol = opt.comparison_tol_rel * std::max(f.range(), 1e-300);

    SolveOptions so;
    so.levels = opt.levels;
    so.grid = level_grid(f, opt.levels);
    std::optional<ApproxDomain> ap;
    if (!dom.flat_parts().empty()) ap = build_strictly_convex(dom, opt.domain_n);
    auto solve_on = [&](const BoundaryFunction& data) {
        if (!ap) return solve_strictly_convex(dom, data, so);
        return solve_strictly_convex(ap->domain, lift_data(data, *ap), so);
    };
    auto sample = [&](const LevelSetSolution& sol) {
        std::vector<double> vals(probes.size());
        parallel_for(static_cast<int>(probes.size()), [&](int i) { vals[i] = sol(probes[i]); });
        return vals;
    };

    if (f.continuous()) {
        // the envelopes collapse onto f
        ContinuousOptions co;
        co.levels = opt.levels;
        co.allow_boundary_case = opt.allow_boundary_case;
        out.u = solve_continuous(dom, f, co);
        out.v = out.u;
        rep.n_used = {0};
    } else {
        std::vector<double> pu, pv;
        for (int n : opt.n_env) {
            auto env = repair_envelope_admissibility(build_envelopes(f, n), f, dom, &rep.last_repair);
            auto su = solve_on(env.h), sv = solve_on(env.g);
            auto cu = sample(su), cv = sample(sv);
            double worst = 0;
            for (size_t i = 0; i < probes.size(); ++i) {
                worst = std::max(worst, cv[i] - cu[i]);
                if (!pu.empty()) worst = std::max({worst, cu[i] - pu[i], pv[i] - cv[i]});
            }
            rep.max_comparison_violation = std::max(rep.max_comparison_violation, worst);
            if (worst > tol)
                throw Error(ErrorKind::ComparisonViolation, "envelope solutions out of order by " + std::to_string(worst) +
                                                                " at n = " + std::to_string(n));
            rep.n_used.push_back(n);
            pu = std::move(cu);
            pv = std::move(cv);
            out.u = std::move(su);
            out.v = std::move(sv);
        }
        for (size_t i = 0; i < probes.size(); ++i) rep.max_gap = std::max(rep.max_gap, pu[i] - pv[i]);
    }

    // trace at continuity points, away from the jumps by the envelope window and the probe depth
    const double P = f.period();
    const int n_last = rep.n_used.back();
    const double keep_out = (n_last > 0 ? 4.0 / n_last : 0.0) + 48 * opt.trace_h;
    const auto ss = continuity_probes(dom, f, opt.trace_samples, keep_out, opt.trace_h);
    std::vector<std::optional<TraceSample>> tr(ss.size());
    parallel_for(static_cast<int>(ss.size()), [&](int i) {
        const double s = ss[i] * dom.perimeter() / P;
        auto tu = normal_trace(dom, out.u.evaluator, s, opt.trace_h);
        auto tv = normal_trace(dom, out.v.evaluator, s, opt.trace_h);
        if (tu && tv) tr[i] = TraceSample{ss[i], dom.point_at(s), f(ss[i]), tu->value, tv->value};
    });
    for (auto& t : tr)
        if (t) {
            rep.trace.push_back(*t);
            rep.trace_error = std::max({rep.trace_error, std::abs(t->tu - t->f), std::abs(t->tv - t->f)});
        }
    const auto mc = modulus_constants(dom);
    for (auto* s : {&out.u, &out.v}) {
        s->A = mc.A;
        s->B = mc.B;
    }
    return out;
}

struct LimitSolution {
    std::vector<double> params;
    std::vector<double> sup_change;  // between consecutive members on the probe grid
    LevelSetSolution u;              // the last member
};

/// Solves f_λ for each λ in `params` (ordered toward the limit) and keeps the last solution. Used when
/// the limiting data sits on the boundary of admissibility and every member is admissible.
inline LimitSolution solve_as_limit(const ConvexDomain& dom, const std::function<BoundaryFunction(double)>& family,
                                    const std::vector<double>& params, const ContinuousOptions& opt = {}) {
    if (params.empty()) throw Error(ErrorKind::BadInput, "empty parameter sequence");
    LimitSolution out;
    out.params = params;
    const auto probes = probe_points(dom, opt.probe_side);
    std::vector<double> prev;
    for (double lam : params) {
        auto u = solve_continuous(dom, family(lam), opt);
        std::vector<double> cur(probes.size());
        parallel_for(static_cast<int>(probes.size()), [&](int i) { cur[i] = u(probes[i]); });
        if (!prev.empty()) {
            double d = 0;
            for (size_t i = 0; i < cur.size(); ++i) d = std::max(d, std::abs(cur[i] - prev[i]));
            out.sup_change.push_back(d);
        }
        prev = std::move(cur);
        out.u = std::move(u);
    }
    return out;
}

}  // namespace lgk
