#pragma once

// BV boundary data in arclength parameterization.
//
// Every datum is stored as a tiling of [0, P] by linear segments; constant and
// sampled pieces are expanded on construction. A jump sits at a knot where the
// left segment's end value and the right segment's start value differ.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"

namespace lgk {

struct LinearSeg {
    double s0 = 0, s1 = 0;  // s0 < s1
    double v0 = 0, v1 = 0;  // right limit at s0, left limit at s1

    double at(double s) const {
        if (s1 <= s0) return v0;
        const double t = std::clamp((s - s0) / (s1 - s0), 0.0, 1.0);
        return v0 + t * (v1 - v0);
    }
    double variation() const { return std::abs(v1 - v0); }
    double lo() const { return std::min(v0, v1); }
    double hi() const { return std::max(v0, v1); }
};

enum class PieceKind { Constant, Linear, Samples };

struct Piece {
    double s0 = 0, s1 = 0;
    PieceKind kind = PieceKind::Linear;
    double v0 = 0, v1 = 0;
    std::vector<double> samples;  // equally spaced over [s0, s1], endpoints included
};

struct Jump {
    double s = 0;
    double left = 0;
    double right = 0;
    double size() const { return std::abs(right - left); }
};

class BoundaryFunction {
public:
    BoundaryFunction() = default;

    /// Builds from contiguous segments tiling [0, period].
    static BoundaryFunction from_segments(std::vector<LinearSeg> segs, double period) {
        if (segs.empty()) throw Error(ErrorKind::BadInput, "no pieces");
        std::sort(segs.begin(), segs.end(), [](auto& a, auto& b) { return a.s0 < b.s0; });
        const double tol = 1e-12 * std::max(1.0, period);
        if (std::abs(segs.front().s0) > tol || std::abs(segs.back().s1 - period) > tol)
            throw Error(ErrorKind::BadInput, "pieces must cover [0, perimeter]");
        std::vector<LinearSeg> out;
        for (size_t i = 0; i < segs.size(); ++i) {
            auto g = segs[i];
            if (!std::isfinite(g.v0) || !std::isfinite(g.v1)) throw Error(ErrorKind::BadInput, "non-finite value");
            if (i > 0 && std::abs(g.s0 - segs[i - 1].s1) > tol)
                throw Error(ErrorKind::BadInput, "pieces leave a gap or overlap at s=" + std::to_string(g.s0));
            if (i > 0) g.s0 = out.back().s1;
            if (g.s1 - g.s0 <= tol) continue;
            out.push_back(g);
        }
        out.front().s0 = 0.0;
        out.back().s1 = period;
        BoundaryFunction f;
        f.segs_ = std::move(out);
        f.period_ = period;
        f.finish();
        return f;
    }

    /// Builds from JSON-style pieces. Declared jumps must agree with the piece limits.
    static BoundaryFunction from_pieces(const std::vector<Piece>& pieces, double period,
                                        const std::vector<Jump>& declared = {}) {
        std::vector<LinearSeg> segs;
        for (const auto& p : pieces) {
            if (!(p.s1 > p.s0)) throw Error(ErrorKind::BadInput, "piece with s1 <= s0");
            switch (p.kind) {
                case PieceKind::Constant: segs.push_back({p.s0, p.s1, p.v0, p.v0}); break;
                case PieceKind::Linear: segs.push_back({p.s0, p.s1, p.v0, p.v1}); break;
                case PieceKind::Samples: {
                    const int m = static_cast<int>(p.samples.size());
                    if (m < 2) throw Error(ErrorKind::BadInput, "samples piece needs >= 2 values");
                    for (int k = 0; k + 1 < m; ++k) {
                        const double a = p.s0 + (p.s1 - p.s0) * k / (m - 1);
                        const double b = p.s0 + (p.s1 - p.s0) * (k + 1) / (m - 1);
                        segs.push_back({a, b, p.samples[k], p.samples[k + 1]});
                    }
                    break;
                }
            }
        }
        auto f = from_segments(std::move(segs), period);
        for (const auto& j : declared) {
            const double l = f.left_limit(j.s), r = f.right_limit(j.s);
            if (std::abs(l - j.left) > 1e3 * f.eps_val() || std::abs(r - j.right) > 1e3 * f.eps_val())
                throw Error(ErrorKind::BadInput, "declared jump at s=" + std::to_string(j.s) +
                                                     " disagrees with piece limits");
        }
        return f;
    }

    std::span<const LinearSeg> segments() const { return segs_; }
    std::span<const Jump> jumps() const { return jumps_; }
    bool continuous() const { return jumps_.empty(); }
    double period() const { return period_; }
    double min() const { return min_; }
    double max() const { return max_; }
    double range() const { return max_ - min_; }
    double eps_val() const { return eps_val_; }
    double knot_tol() const { return 1e-12 * std::max(1.0, period_); }

    double wrap(double s) const {
        double r = std::fmod(s, period_);
        if (r < 0) r += period_;
        if (r >= period_) r -= period_;
        return r;
    }

    /// Index of the segment with s0 <= s < s1.
    int segment_index(double s) const {
        s = wrap(s);
        auto it = std::upper_bound(segs_.begin(), segs_.end(), s, [](double v, const LinearSeg& g) { return v < g.s0; });
        return std::clamp(static_cast<int>(it - segs_.begin()) - 1, 0, static_cast<int>(segs_.size()) - 1);
    }

    double right_limit(double s) const {
        s = wrap(s);
        const int i = segment_index(s + knot_tol());
        const auto& g = segs_[i];
        if (std::abs(s - g.s0) <= knot_tol()) return g.v0;
        return g.at(s);
    }

    double left_limit(double s) const {
        s = wrap(s);
        if (s <= knot_tol()) return segs_.back().v1;
        const int i = segment_index(s - knot_tol());
        const auto& g = segs_[i];
        if (std::abs(s - g.s1) <= knot_tol()) return g.v1;
        return g.at(s);
    }

    /// Good representative; midpoint of the one-sided limits at a jump.
    double operator()(double s) const { return 0.5 * (left_limit(s) + right_limit(s)); }
    double evaluate(double s) const { return (*this)(s); }

    std::optional<Jump> jump_at(double s) const {
        s = wrap(s);
        for (const auto& j : jumps_)
            if (std::abs(j.s - s) <= knot_tol() || std::abs(std::abs(j.s - s) - period_) <= knot_tol()) return j;
        return std::nullopt;
    }

    double total_variation() const {
        double tv = 0;
        for (const auto& g : segs_) tv += g.variation();
        for (const auto& j : jumps_) tv += j.size();
        return tv;
    }

    /// Segments clipped to the unrolled arc [s0, s1] (s1 - s0 <= period); coordinates stay unrolled.
    std::vector<LinearSeg> arc(double s0, double s1) const {
        std::vector<LinearSeg> out;
        if (s1 <= s0) return out;
        const double base = std::floor(s0 / period_) * period_;
        for (int rep = 0; rep < 3; ++rep) {
            const double off = base + rep * period_;
            for (const auto& g : segs_) {
                const double a = std::max(s0, g.s0 + off), b = std::min(s1, g.s1 + off);
                if (b - a <= knot_tol() * 1e-3) continue;
                out.push_back({a, b, g.at(a - off), g.at(b - off)});
            }
        }
        return out;
    }

    /// Rotates the parameterization so that s = shift becomes the new origin.
    BoundaryFunction rotated(double shift) const {
        shift = wrap(shift);
        auto a = arc(shift, shift + period_);
        for (auto& g : a) {
            g.s0 -= shift;
            g.s1 -= shift;
        }
        return from_segments(std::move(a), period_);
    }

    /// ω_f in arclength: sup |f(s) − f(s')| over |s − s'| <= r. Exact for piecewise linear data.
    double modulus_of_continuity(double r) const {
        if (!continuous()) throw Error(ErrorKind::DiscontinuousData, "modulus needs continuous data");
        if (r <= 0) return 0.0;
        if (2 * r >= period_) return max_ - min_;
        // knot values over two periods, with range max/min via sparse tables
        std::vector<double> ks, kv;
        for (int rep = 0; rep < 2; ++rep)
            for (const auto& g : segs_) {
                ks.push_back(g.s0 + rep * period_);
                kv.push_back(g.v0);
            }
        ks.push_back(2 * period_);
        kv.push_back(segs_.front().v0);
        const int n = static_cast<int>(ks.size());
        int lg = 1;
        while ((1 << lg) < n) ++lg;
        std::vector<std::vector<double>> mx(lg + 1, kv), mn(lg + 1, kv);
        for (int j = 1; j <= lg; ++j)
            for (int i = 0; i + (1 << j) <= n; ++i) {
                mx[j][i] = std::max(mx[j - 1][i], mx[j - 1][i + (1 << (j - 1))]);
                mn[j][i] = std::min(mn[j - 1][i], mn[j - 1][i + (1 << (j - 1))]);
            }
        auto query = [&](int i, int j, double& hi, double& lo) {  // inclusive range
            if (i > j) return;
            int k = 0;
            while ((2 << k) <= j - i + 1) ++k;
            hi = std::max({hi, mx[k][i], mx[k][j - (1 << k) + 1]});
            lo = std::min({lo, mn[k][i], mn[k][j - (1 << k) + 1]});
        };
        const int n1 = static_cast<int>(segs_.size());
        double best = 0;
        for (int i = 0; i < n1; ++i) {
            const double a = ks[i];
            const double va = kv[i];
            // window [a, a + r]
            const double b = a + r;
            const int j = static_cast<int>(std::upper_bound(ks.begin(), ks.end(), b) - ks.begin()) - 1;
            double hi = va, lo = va;
            query(i, j, hi, lo);
            const double vb = (*this)(b);
            hi = std::max(hi, vb);
            lo = std::min(lo, vb);
            // window [a - r, a] taken in the second period copy
            const double a2 = a + period_;
            const double c = a2 - r;
            const int i2 = i + n1;
            const int jc = static_cast<int>(std::lower_bound(ks.begin(), ks.end(), c) - ks.begin());
            query(jc, i2, hi, lo);
            const double vc = (*this)(c);
            hi = std::max(hi, vc);
            lo = std::min(lo, vc);
            best = std::max({best, hi - va, va - lo});
        }
        return best;
    }

private:
    void finish() {
        min_ = std::numeric_limits<double>::infinity();
        max_ = -min_;
        for (const auto& g : segs_) {
            min_ = std::min(min_, g.lo());
            max_ = std::max(max_, g.hi());
        }
        eps_val_ = std::max(1e-10 * (max_ - min_), 1e-14);
        jumps_.clear();
        for (size_t i = 0; i < segs_.size(); ++i) {
            const auto& prev = segs_[(i + segs_.size() - 1) % segs_.size()];
            const auto& cur = segs_[i];
            if (std::abs(prev.v1 - cur.v0) > eps_val_) jumps_.push_back({cur.s0, prev.v1, cur.v0});
        }
    }

    std::vector<LinearSeg> segs_;
    std::vector<Jump> jumps_;
    double period_ = 0;
    double min_ = 0, max_ = 0;
    double eps_val_ = 1e-14;
};

/// Samples g along the boundary. Knots are placed at every vertex, at the extra arclengths, and on a
/// uniform subdivision of each edge with spacing at most h. g receives the point and the edge index,
/// so data may differ on the two edges meeting at a vertex.
inline BoundaryFunction sample_boundary(const ConvexDomain& dom,
                                        const std::function<double(const Point&, int)>& g, double h,
                                        std::vector<double> extra_knots = {}) {
    std::vector<LinearSeg> segs;
    for (auto& s : extra_knots) s = dom.wrap_s(s);
    std::sort(extra_knots.begin(), extra_knots.end());
    for (int e = 0; e < dom.size(); ++e) {
        const double s0 = dom.arclength_at_vertex(e);
        const double len = dist(dom.vertex(e), dom.vertex(e + 1));
        const double s1 = s0 + len;
        std::vector<double> knots;
        const int m = std::max(1, static_cast<int>(std::ceil(len / h)));
        for (int k = 0; k <= m; ++k) knots.push_back(s0 + len * k / m);
        for (double s : extra_knots)
            if (s > s0 && s < s1) knots.push_back(s);
        std::sort(knots.begin(), knots.end());
        knots.erase(std::unique(knots.begin(), knots.end(),
                                [&](double a, double b) { return b - a <= 1e-12 * dom.perimeter(); }),
                    knots.end());
        knots.back() = s1;
        auto at = [&](double s) { return g(lerp(dom.vertex(e), dom.vertex(e + 1), (s - s0) / len), e); };
        for (size_t k = 0; k + 1 < knots.size(); ++k) segs.push_back({knots[k], knots[k + 1], at(knots[k]), at(knots[k + 1])});
    }
    segs.back().s1 = dom.perimeter();
    return BoundaryFunction::from_segments(std::move(segs), dom.perimeter());
}

inline BoundaryFunction sample_boundary(const ConvexDomain& dom, const std::function<double(const Point&)>& g,
                                        double h, std::vector<double> extra_knots = {}) {
    return sample_boundary(
        dom, [&](const Point& p, int) { return g(p); }, h, std::move(extra_knots));
}

/// Canonical Jordan decomposition on the arc cut at s = 0: f = f⁺ − f⁻ with f⁺(0⁺) = f(0⁺), f⁻(0⁺) = 0.
/// Both parts are nondecreasing along [0, P); the closing jump at P carries their total increase.
struct JordanParts {
    BoundaryFunction plus;
    BoundaryFunction minus;
};

inline JordanParts jordan_decompose(const BoundaryFunction& f) {
    std::vector<LinearSeg> p, m;
    double P = f.segments().front().v0, M = 0.0;
    double prev_v1 = f.segments().front().v0;
    for (const auto& g : f.segments()) {
        const double dj = g.v0 - prev_v1;  // jump at g.s0 (zero at the origin)
        if (dj > 0) P += dj; else M -= dj;
        const double dv = g.v1 - g.v0;
        const double p1 = P + std::max(dv, 0.0), m1 = M + std::max(-dv, 0.0);
        p.push_back({g.s0, g.s1, P, p1});
        m.push_back({g.s0, g.s1, M, m1});
        P = p1;
        M = m1;
        prev_v1 = g.v1;
    }
    return {BoundaryFunction::from_segments(std::move(p), f.period()),
            BoundaryFunction::from_segments(std::move(m), f.period())};
}

enum class HumpKind { LocalMax, LocalMin, NonHump };

inline const char* to_string(HumpKind k) {
    switch (k) {
        case HumpKind::LocalMax: return "local-max";
        case HumpKind::LocalMin: return "local-min";
        case HumpKind::NonHump: return "non-hump";
    }
    return "?";
}

struct Hump {
    int flat_part = -1;
    double s_a = 0, s_b = 0;  // unrolled arclength, s_a < s_b
    Point a, b;
    double value = 0;
    HumpKind kind = HumpKind::LocalMax;
    std::optional<Point> y, z;  // witnesses, filled by the admissibility checker
    double length() const { return dist(a, b); }
};

/// Sign of f − e met first when walking away from s in direction dir (+1 ccw, −1 cw), ignoring
/// stretches where f stays within eps of e. Zero if f ≡ e everywhere.
inline int departure_sign(const BoundaryFunction& f, double s, int dir, double e) {
    const double eps = f.eps_val();
    auto sg = [&](double v) { return std::abs(v - e) <= eps ? 0 : (v > e ? 1 : -1); };
    const double P = f.period();
    auto segs = dir > 0 ? f.arc(s, s + P) : f.arc(s - P, s);
    if (dir > 0) {
        for (const auto& g : segs) {
            if (int k = sg(g.v0)) return k;
            if (int k = sg(g.v1)) return k;
        }
    } else {
        for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
            if (int k = sg(it->v1)) return k;
            if (int k = sg(it->v0)) return k;
        }
    }
    return 0;
}

struct HumpInventory {
    std::vector<Hump> humps;        // sorted by flat part, then arclength
    std::vector<Hump> end_plateaus; // constant end intervals that are not extrema
};

/// Maximal plateaus of f on each flat part, classified by the values f takes beyond their ends.
inline HumpInventory detect_humps(const BoundaryFunction& f, const ConvexDomain& dom) {
    HumpInventory inv;
    const double eps = f.eps_val();
    const double stol = 1e-9 * dom.diameter();
    for (const auto& fp : dom.flat_parts()) {
        const auto segs = f.arc(fp.s_a, fp.s_b);
        size_t i = 0;
        while (i < segs.size()) {
            const auto& g = segs[i];
            if (std::abs(g.v1 - g.v0) > eps) { ++i; continue; }
            const double e = g.v0;
            size_t j = i;
            while (j + 1 < segs.size() && std::abs(segs[j + 1].v0 - e) <= eps && std::abs(segs[j + 1].v1 - e) <= eps &&
                   std::abs(segs[j].v1 - segs[j + 1].v0) <= eps)
                ++j;
            Hump h;
            h.flat_part = fp.id;
            h.s_a = segs[i].s0;
            h.s_b = segs[j].s1;
            h.a = dom.point_at(h.s_a);
            h.b = dom.point_at(h.s_b);
            h.value = e;
            const int sl = departure_sign(f, h.s_a, -1, e);
            const int sr = departure_sign(f, h.s_b, +1, e);
            const bool at_end = h.s_a <= fp.s_a + stol || h.s_b >= fp.s_b - stol;
            if (sl == 0 && sr == 0) h.kind = HumpKind::NonHump;
            else if (sl <= 0 && sr <= 0) h.kind = HumpKind::LocalMax;
            else if (sl >= 0 && sr >= 0) h.kind = HumpKind::LocalMin;
            else h.kind = HumpKind::NonHump;
            if (h.kind != HumpKind::NonHump) inv.humps.push_back(h);
            else if (at_end) inv.end_plateaus.push_back(h);
            i = j + 1;
        }
    }
    return inv;
}

/// Sampled planar modulus sup{|f(x) − f(y)| : x, y ∈ ∂Ω, |x − y| <= r}, from all pairs of boundary
/// samples (knots plus a uniform grid); a lower estimate that converges as the sampling refines.
class EuclideanModulus {
public:
    EuclideanModulus(const BoundaryFunction& f, const ConvexDomain& dom, int samples = 1500) {
        std::vector<std::pair<Point, double>> pts;
        for (int k = 0; k < samples; ++k) {
            const double s = dom.perimeter() * k / samples;
            pts.push_back({dom.point_at(s), f(s)});
        }
        for (const auto& g : f.segments()) pts.push_back({dom.point_at(g.s0), g.v0});
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(pts.size() * (pts.size() - 1) / 2);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                pairs.push_back({dist(pts[i].first, pts[j].first), std::abs(pts[i].second - pts[j].second)});
        std::sort(pairs.begin(), pairs.end());
        r_.reserve(pairs.size());
        double run = 0;
        for (auto& [d, v] : pairs) {
            run = std::max(run, v);
            if (!r_.empty() && r_.back() == d) w_.back() = run;
            else {
                r_.push_back(d);
                w_.push_back(run);
            }
        }
    }

    double operator()(double r) const {
        auto it = std::upper_bound(r_.begin(), r_.end(), r);
        if (it == r_.begin()) return 0.0;
        return w_[static_cast<size_t>(it - r_.begin()) - 1];
    }

private:
    std::vector<double> r_, w_;
};

}  // namespace lgk
