#pragma once

// Reference domains and boundary data used by the tests, the acceptance suite and `lgk example`.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lgk/boundary_data.hpp"
#include "lgk/geometry.hpp"

namespace lgk::fixtures {

using std::numbers::pi;

inline ConvexDomain rectangle(double x0, double y0, double x1, double y1) {
    return build_domain({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

inline ConvexDomain unit_square() { return rectangle(0, 0, 1, 1); }

/// Regular n-gon of circumradius r centred at c; curve=true flags every edge as a curve sample.
inline ConvexDomain regular_polygon(int n, double r, bool curve, Point c = {0, 0}, double phase = 0.0) {
    std::vector<Point> v;
    for (int i = 0; i < n; ++i) {
        const double a = phase + 2 * pi * i / n;
        v.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return build_domain(v, std::vector<bool>(n, curve), {}, std::nullopt);
}

inline ConvexDomain disk(double r = 1.0, int samples = 256) { return regular_polygon(samples, r, true); }

inline ConvexDomain ellipse(double a, double b, int samples = 256) {
    std::vector<Point> v;
    for (int i = 0; i < samples; ++i) {
        const double t = 2 * pi * i / samples;
        v.push_back({a * std::cos(t), b * std::sin(t)});
    }
    return build_domain(v, std::vector<bool>(samples, true), {}, std::nullopt);
}

/// Strictly convex egg: r(t) = 1 + 0.2 cos t, sampled.
inline ConvexDomain egg(int samples = 256) {
    std::vector<Point> v;
    for (int i = 0; i < samples; ++i) {
        const double t = 2 * pi * i / samples;
        const double r = 1 + 0.2 * std::cos(t);
        v.push_back({r * std::cos(t), 0.8 * r * std::sin(t)});
    }
    return build_domain(v, std::vector<bool>(samples, true), {}, std::nullopt);
}

/// Stadium: flat sides y = 0 and y = 2 on [−1, 1], joined tangentially by sampled half-circles.
inline ConvexDomain stadium(int samples_per_end = 32) {
    std::vector<Point> v;
    std::vector<bool> curve;
    const int m = samples_per_end;
    v.push_back({-1, 0});
    curve.push_back(false);
    for (int i = 0; i < m; ++i) {
        const double a = -pi / 2 + pi * i / m;
        v.push_back({1 + std::cos(a), 1 + std::sin(a)});
        curve.push_back(true);
    }
    v.push_back({1, 2});
    curve.push_back(false);
    for (int i = 0; i < m; ++i) {
        const double a = pi / 2 + pi * i / m;
        v.push_back({-1 + std::cos(a), 1 + std::sin(a)});
        curve.push_back(true);
    }
    return build_domain(v, curve, {}, std::nullopt);
}

/// The two-sided rectangle example: (−L, L) × (0, height).
struct RectangleExample {
    double L = 2.0;
    double height = 1.0;
    ConvexDomain domain() const { return rectangle(-L, 0, L, height); }
};

/// f_λ = min(g, g(L − λ)) on the horizontal edges with g(x) = L² − x², zero on the vertical edges.
inline BoundaryFunction co1_data(const ConvexDomain& dom, double L, double lambda, double h = 2e-3) {
    const double c = L * L - (L - lambda) * (L - lambda);
    const double H = dom.vertex(2).y;
    auto g = [=](const Point& p) {
        if (std::abs(p.x) >= L - 1e-15) return 0.0;
        return std::min(L * L - p.x * p.x, c);
    };
    std::vector<double> knots;
    for (double y : {0.0, H})
        for (double x : {-(L - lambda), L - lambda}) knots.push_back(dom.arclength_of({x, y}));
    return sample_boundary(dom, g, h, knots);
}

/// v_μ: x + L on the top edge, μ on the right edge, 0 on the bottom and left edges.
inline BoundaryFunction co2_data(const ConvexDomain& dom, double L, double mu, double h = 2e-3) {
    // edges of rectangle(): 0 bottom, 1 right, 2 top, 3 left
    auto g = [=](const Point& p, int e) {
        switch (e) {
            case 1: return mu;
            case 2: return p.x + L;
            default: return 0.0;
        }
    };
    return sample_boundary(dom, g, h);
}

/// Closed-form solution for co1_data: u(x, y) = f_λ(x).
inline double co1_solution(const Point& p, double L, double lambda) {
    return std::min(L * L - p.x * p.x, L * L - (L - lambda) * (L - lambda));
}

/// v_μ with μ = 2L on the unit-height rectangle: every level chord runs from the jump at (L, 0) to the top edge.
inline double co2_fan_solution(const Point& p, double L) {
    if (p.y <= 0) return 0;
    return std::clamp(2 * L + (p.x - L) / p.y, 0.0, 2 * L);
}

/// Humps accumulating at the apex of an acute wedge: ℓ₁ = [0, L₁] × {0}, ℓ₂ of length L₁ at angle α, closed
/// by a circular arc whose radius equals its chord. Hump k sits on (L_{2k}, L_{2k−1}) ⊂ ℓ₁ and on the projection
/// of that interval onto ℓ₂, with value (−1)^{k+1}/k; f is 1 on the arc and linear in between. The family is
/// truncated after K humps, with f linear from 0 at the apex up to the K-th hump.
struct InfiniteHumpExample {
    double alpha = pi / 6;
    double L1 = 1.0;
    int K = 6;
    int arc_samples = 32;

    double eps(int k) const {
        const double s = std::sin(alpha);
        return 0.25 * (1 - s) * (1 - s) / (1 + s) / std::pow(2.0, k - 1);
    }
    /// L_1, L_2, ..., L_{2K}.
    std::vector<double> lengths() const {
        const double s = std::sin(alpha);
        std::vector<double> L{L1};
        double odd = L1;
        for (int k = 1; k <= K; ++k) {
            L.push_back(L.back() * ((1 - s) / (1 + s) - eps(k)));
            odd *= (1 - s) * (1 - s) / (1 + s) - eps(k);
            if (k < K) L.push_back(odd);
        }
        return L;
    }
    static double value(int k) { return (k % 2 ? 1.0 : -1.0) / k; }

    ConvexDomain domain() const {
        const Point A{L1, 0}, B{L1 * std::cos(alpha), L1 * std::sin(alpha)};
        const double c = dist(A, B);
        const Point M = 0.5 * (A + B);
        const Point inward = unit(Point{0, 0} - M);
        const Point C = M + std::sqrt(0.75) * c * inward;  // radius c
        const double a0 = std::atan2(A.y - C.y, A.x - C.x), a1 = std::atan2(B.y - C.y, B.x - C.x);
        std::vector<Point> v{{0, 0}, A};
        std::vector<bool> curve{false, true};
        for (int i = 1; i < arc_samples; ++i) {
            const double a = a0 + (a1 - a0) * i / arc_samples;
            v.push_back(C + c * Point{std::cos(a), std::sin(a)});
            curve.push_back(true);
        }
        v.push_back(B);
        curve.push_back(false);
        return build_domain(v, curve, {}, std::nullopt);
    }

    /// Data along ℓ₁ at distance x from the apex.
    double on_l1(double x) const {
        const auto L = lengths();
        if (x >= L[0]) return value(1);
        std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
        for (int k = K; k >= 1; --k) {
            knots.push_back({L[2 * k - 1], value(k)});
            knots.push_back({L[2 * k - 2], value(k)});
        }
        for (size_t i = 0; i + 1 < knots.size(); ++i)
            if (x <= knots[i + 1].first) {
                const auto [x0, v0] = knots[i];
                const auto [x1, v1] = knots[i + 1];
                return x1 > x0 ? v0 + (v1 - v0) * (x - x0) / (x1 - x0) : v1;
            }
        return value(1);
    }

    BoundaryFunction data(const ConvexDomain& dom, double h = 0.01) const {
        const double ca = std::cos(alpha);
        const Point dir{ca, std::sin(alpha)};
        const int last = dom.size() - 1;  // ℓ₂ runs from the last vertex back to the apex
        auto g = [=, this](const Point& p, int e) {
            if (e == 0) return on_l1(p.x);
            if (e == last) {
                const double r = dot(p, dir);
                return r >= L1 * ca ? value(1) : on_l1(r / ca);
            }
            return 1.0;
        };
        std::vector<double> knots;
        for (double x : lengths()) {
            knots.push_back(dom.arclength_of({x, 0}));
            knots.push_back(dom.arclength_of(x * ca * dir));
        }
        knots.push_back(dom.arclength_of(L1 * ca * dir));
        return sample_boundary(dom, g, h, knots);
    }
};

}  // namespace lgk::fixtures
