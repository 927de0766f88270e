#pragma once

// Monotone continuous envelopes g_n ≤ f ≤ h_n of BV boundary data.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <vector>

#include "lgk/admissibility.hpp"
#include "lgk/boundary_data.hpp"
#include "lgk/geometry.hpp"

namespace lgk {

namespace detail {

/// Extremes of f (one-sided limits included) over the arclength window [a, b].
inline std::pair<double, double> window_range(const BoundaryFunction& f, double a, double b) {
    const auto segs = f.segments();
    const double P = f.period();
    const int n = static_cast<int>(segs.size());
    double lo = INFINITY, hi = -INFINITY;
    const double base = std::floor(a / P) * P;
    double off = base;
    int k = f.segment_index(a - base);
    for (int guard = 0; guard <= 2 * n + 2; ++guard) {
        const auto& g = segs[k];
        const double s0 = g.s0 + off, s1 = g.s1 + off;
        if (s0 > b) break;
        if (s1 >= a) {
            const double c0 = std::max(s0, a), c1 = std::min(s1, b);
            const double v0 = g.at(c0 - off), v1 = g.at(c1 - off);
            lo = std::min({lo, v0, v1});
            hi = std::max({hi, v0, v1});
        }
        if (++k == n) {
            k = 0;
            off += P;
        }
    }
    return {lo, hi};
}

inline double bump(double z) { return std::abs(z) < 1 ? std::exp(-1.0 / (1 - z * z)) : 0.0; }

}  // namespace detail

namespace detail {

/// ∫ φ(z) · window extreme over [c − r, c + r], c = x − z r, split where a jump enters or leaves
/// the window so each Gauss-64 panel sees a smooth integrand.
inline double mollified_extreme(const BoundaryFunction& f, int n, double x, bool upper) {
    const double r = 1.0 / n;
    const double P = f.period();
    std::vector<double> zs{-1.0, 1.0};
    for (const auto& j : f.jumps()) {
        double k = j.s;
        k += std::round((x - k) / P) * P;
        for (double kk : {k - P, k, k + P})
            for (double z : {(x - r - kk) / r, (x + r - kk) / r})
                if (z > -1 && z < 1) zs.push_back(z);
    }
    std::sort(zs.begin(), zs.end());
    auto integrand = [&](double z) {
        const double c = x - z * r;
        const auto [lo, hi] = window_range(f, c - r, c + r);
        return bump(z) * (upper ? hi : lo);
    };
    using G = boost::math::quadrature::gauss<double, 64>;
    double total = 0, mass = 0;
    for (size_t i = 0; i + 1 < zs.size(); ++i)
        if (zs[i + 1] > zs[i]) {
            total += G::integrate(integrand, zs[i], zs[i + 1]);
            mass += G::integrate(bump, zs[i], zs[i + 1]);
        }
    return total / mass;
}

}  // namespace detail

/// g_n(x) = ∫ φ(z) inf_{|y − (x − z/n)| ≤ 1/n} f(y) dz. Where f is nondecreasing this is
/// f ∗ φ_{1/n}(x − 1/n); the window infimum extends the construction to arbitrary BV data on a closed
/// curve while keeping g_n ≤ f, continuity, and g_n increasing in n.
inline double envelope_lower(const BoundaryFunction& f, int n, double x) { return detail::mollified_extreme(f, n, x, false); }

/// Mirror of envelope_lower with the window supremum.
inline double envelope_upper(const BoundaryFunction& f, int n, double x) { return detail::mollified_extreme(f, n, x, true); }

struct EnvelopePair {
    int n = 1;
    BoundaryFunction g, h;
};

/// Piecewise-linear samples of g_n and h_n at spacing ≤ 1/(4n) (or `h` when given).
inline EnvelopePair build_envelopes(const BoundaryFunction& f, int n, double h = 0) {
    const double P = f.period();
    if (h <= 0) h = 0.25 / n;
    const int m = std::max(16, static_cast<int>(std::ceil(P / h)));
    std::vector<LinearSeg> gs, hs;
    std::vector<double> gv(m + 1), hv(m + 1);
    for (int k = 0; k < m; ++k) {
        const double s = P * k / m;
        gv[k] = envelope_lower(f, n, s);
        hv[k] = envelope_upper(f, n, s);
    }
    gv[m] = gv[0];
    hv[m] = hv[0];
    for (int k = 0; k < m; ++k) {
        const double s0 = P * k / m, s1 = k + 1 == m ? P : P * (k + 1) / m;
        gs.push_back({s0, s1, gv[k], gv[k + 1]});
        hs.push_back({s0, s1, hv[k], hv[k + 1]});
    }
    return {n, BoundaryFunction::from_segments(std::move(gs), P), BoundaryFunction::from_segments(std::move(hs), P)};
}

namespace detail {

/// min(g, c) on linear pieces, split at the crossing.
inline void push_min(std::vector<LinearSeg>& out, LinearSeg g, double c, bool take_max = false) {
    auto pick = [&](double v) { return take_max ? std::max(v, c) : std::min(v, c); };
    const bool above0 = take_max ? g.v0 < c : g.v0 > c, above1 = take_max ? g.v1 < c : g.v1 > c;
    if (above0 == above1) {
        out.push_back({g.s0, g.s1, pick(g.v0), pick(g.v1)});
        return;
    }
    const double w = (c - g.v0) / (g.v1 - g.v0);
    const double sm = g.s0 + w * (g.s1 - g.s0);
    if (sm <= g.s0 || sm >= g.s1) {
        out.push_back({g.s0, g.s1, pick(g.v0), pick(g.v1)});
        return;
    }
    out.push_back({g.s0, sm, pick(g.v0), c});
    out.push_back({sm, g.s1, c, pick(g.v1)});
}

/// x ↦ max(g(a), min_{x ≤ y ≤ b} g(y)) on an unrolled arc: nondecreasing, equal to g at both ends
/// when g(a) ≤ g(b).
inline std::vector<LinearSeg> flatten_nondecreasing(const std::vector<LinearSeg>& g) {
    std::vector<LinearSeg> rev;
    double m = INFINITY;
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
        const double mc = std::min(it->v1, m);
        std::vector<LinearSeg> piece;
        push_min(piece, *it, mc);
        for (auto p = piece.rbegin(); p != piece.rend(); ++p) rev.push_back(*p);
        m = std::min(mc, it->v0);
    }
    std::vector<LinearSeg> out;
    const double ga = g.front().v0;
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) push_min(out, *it, ga, true);
    return out;
}

/// g with the arc [s0, s1] (unrolled) replaced by `mid`.
inline BoundaryFunction replace_arc(const BoundaryFunction& g, double s0, double s1, std::vector<LinearSeg> mid) {
    const double P = g.period();
    auto rest = g.arc(s1, s0 + P);
    for (auto& x : rest) mid.push_back(x);
    std::vector<LinearSeg> out;
    for (auto x : mid) {
        const double k = std::floor(x.s0 / P);
        x.s0 -= k * P;
        x.s1 -= k * P;
        if (x.s1 <= P + 1e-15 * P) {
            out.push_back(x);
            continue;
        }
        const double vm = x.at(P);
        out.push_back({x.s0, P, x.v0, vm});
        out.push_back({0, x.s1 - P, vm, x.v1});
    }
    for (auto& x : out) {
        x.s0 = std::clamp(x.s0, 0.0, P);
        x.s1 = std::clamp(x.s1, 0.0, P);
    }
    std::erase_if(out, [](const LinearSeg& x) { return x.s1 <= x.s0; });
    return BoundaryFunction::from_segments(std::move(out), P);
}

inline BoundaryFunction make_monotone_on(const BoundaryFunction& g, const FlatPart& fp, int direction) {
    auto arc = g.arc(fp.s_a, fp.s_b);
    if (arc.empty()) return g;
    if (direction < 0) {
        // reflect, flatten as nondecreasing, reflect back
        std::vector<LinearSeg> r;
        for (auto it = arc.rbegin(); it != arc.rend(); ++it) r.push_back({-it->s1, -it->s0, it->v1, it->v0});
        auto fl = flatten_nondecreasing(r);
        arc.clear();
        for (auto it = fl.rbegin(); it != fl.rend(); ++it) arc.push_back({-it->s1, -it->s0, it->v1, it->v0});
    } else {
        arc = flatten_nondecreasing(arc);
    }
    return replace_arc(g, fp.s_a, fp.s_b, std::move(arc));
}

}  // namespace detail

struct RepairReport {
    std::vector<int> flattened_g, flattened_h;  // flat parts rebuilt as monotone
    Verdict g_verdict = Verdict::Pass, h_verdict = Verdict::Pass;
};

/// Restores admissibility of an envelope pair: on flat parts where f passes #1 with a monotone
/// direction, g_n and h_n are flattened to x ↦ max(g(a), min_{[x,b]} g) (mirrored for decreasing f),
/// which keeps the end values, the sandwich and monotonicity in n. #2 parts are only re-checked.
inline EnvelopePair repair_envelope_admissibility(const EnvelopePair& e, const BoundaryFunction& f,
                                                  const ConvexDomain& dom, RepairReport* report = nullptr) {
    RepairReport rep;
    EnvelopePair out = e;
    const auto rf = check_admissibility(f, dom);
    for (auto* which : {&out.g, &out.h}) {
        auto r = check_admissibility(*which, dom);
        for (const auto& part : r.parts) {
            if (part.verdict != Verdict::Fail) continue;
            const auto& src = rf.parts.at(part.flat_part);
            if (src.verdict == Verdict::Fail || !src.monotone) continue;
            const auto& fp = dom.flat_parts()[part.flat_part];
            const auto mono = monotone_on(f, fp.s_a, fp.s_b);
            if (!mono.monotone) continue;
            const double ga = which->right_limit(fp.s_a), gb = which->left_limit(fp.s_b);
            // constant f on ℓ: follow the envelope's own end values
            const int dir = mono.direction != 0 ? mono.direction : (gb < ga ? -1 : 1);
            if ((dir > 0 && ga > gb) || (dir < 0 && ga < gb))
                throw Error(ErrorKind::RepairFailed, "envelope ends are out of order on flat part " +
                                                         std::to_string(fp.id) + " at n = " + std::to_string(e.n));
            *which = detail::make_monotone_on(*which, fp, dir);
            (which == &out.g ? rep.flattened_g : rep.flattened_h).push_back(fp.id);
        }
        const auto v = check_admissibility(*which, dom).global;
        (which == &out.g ? rep.g_verdict : rep.h_verdict) = v;
        if (v == Verdict::Fail)
            throw Error(ErrorKind::RepairFailed, std::string(which == &out.g ? "g" : "h") + "_n still fails the checker at n = " +
                                                     std::to_string(e.n));
    }
    if (report) *report = rep;
    return out;
}

}  // namespace lgk
