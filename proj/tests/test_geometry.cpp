#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lgk/geometry.hpp"

using namespace lgk;
using std::numbers::pi;

namespace {

ConvexDomain square() { return build_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

ConvexDomain rect(double L) { return build_domain({{-L, -1}, {L, -1}, {L, 1}, {-L, 1}}); }

ConvexDomain regular(int n, double r, bool curve) {
    std::vector<Point> v;
    for (int i = 0; i < n; ++i) v.push_back({r * std::cos(2 * pi * i / n), r * std::sin(2 * pi * i / n)});
    return build_domain(v, std::vector<bool>(n, curve));
}

}  // namespace

TEST(BuildDomain, SquareHasFourRightAngledFlatParts) {
    auto d = square();
    ASSERT_EQ(d.flat_parts().size(), 4u);
    for (const auto& fp : d.flat_parts()) {
        EXPECT_NEAR(fp.end_angle_l, pi / 2, 1e-12);
        EXPECT_NEAR(fp.end_angle_r, pi / 2, 1e-12);
        EXPECT_FALSE(fp.obtuse_l);
        EXPECT_NEAR(fp.length(), 1.0, 1e-12);
    }
    for (double a : d.corner_angles()) EXPECT_NEAR(a, pi / 2, 1e-12);
    EXPECT_NEAR(d.perimeter(), 4.0, 1e-12);
}

TEST(BuildDomain, RectangleFlatLengths) {
    auto d = rect(2.0);
    ASSERT_EQ(d.flat_parts().size(), 4u);
    const double want[] = {4, 2, 4, 2};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(d.flat_parts()[i].length(), want[i], 1e-12);
}

TEST(BuildDomain, CurveSamplesAreNeverFlat) {
    Tolerances tol;
    tol.flat_abs = 0.02;
    std::vector<Point> v;
    for (int i = 0; i < 64; ++i) v.push_back({0.5 * std::cos(2 * pi * i / 64), 0.5 * std::sin(2 * pi * i / 64)});
    auto d = build_domain(v, std::vector<bool>(64, true), tol, std::nullopt);
    EXPECT_TRUE(d.flat_parts().empty());
    EXPECT_LT(2 * std::sin(pi / 64) * 0.5, 0.05);
    // unflagged: every edge longer than ε_flat is flat
    auto d2 = regular(64, 0.5, false);
    EXPECT_EQ(d2.flat_parts().size(), 64u);
}

TEST(BuildDomain, CollinearRunsMerge) {
    auto d = build_domain({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {0, 1}});
    ASSERT_EQ(d.flat_parts().size(), 4u);
    EXPECT_NEAR(d.flat_parts()[0].length(), 2.0, 1e-12);
    EXPECT_EQ(d.flat_parts()[0].edge_count, 2);
}

TEST(BuildDomain, ClockwiseAndClosedInputNormalised) {
    auto d = build_domain({{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
    EXPECT_EQ(d.size(), 4);
    EXPECT_GT(d.area(), 0);
}

TEST(BuildDomain, ClockwiseKeepsSmoothFlags) {
    // bottom edge flat, the rest curve samples; list clockwise
    std::vector<Point> ccw = {{-1, 0}, {1, 0}, {0.8, 0.6}, {0, 1}, {-0.8, 0.6}};
    std::vector<Point> cw(ccw.rbegin(), ccw.rend());
    // cw edge i goes cw[i] -> cw[i+1]; the flat edge is (1,0) -> (-1,0), i.e. cw[3] -> cw[4]
    std::vector<bool> fl = {true, true, true, false, true};
    auto d = build_domain(cw, fl, {}, std::nullopt);
    ASSERT_EQ(d.flat_parts().size(), 1u);
    EXPECT_NEAR(d.flat_parts()[0].p_l.x, -1, 1e-12);
    EXPECT_NEAR(d.flat_parts()[0].p_r.x, 1, 1e-12);
}

TEST(BuildDomain, Errors) {
    EXPECT_THROW(build_domain({{0, 0}, {1, 0}}), Error);
    try {
        build_domain({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonConvex);
    }
    try {
        build_domain({{0, 0}, {1, 0}, {1, 0}, {0, 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateChain);
    }
    try {
        build_domain({{0, 0}, {1, 0}, {2, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateChain);
    }
}

TEST(BuildDomain, TangentialJunctionReportedAsStraight) {
    // stadium: flat bottom from (-1,0) to (1,0), tangent semicircle-like arcs
    std::vector<Point> v;
    std::vector<bool> fl;
    v.push_back({-1, 0});
    fl.push_back(false);
    const int m = 32;
    for (int i = 0; i < m; ++i) {  // right half-circle centred (1,1)
        double a = -pi / 2 + pi * i / m;
        v.push_back({1 + std::cos(a), 1 + std::sin(a)});
        fl.push_back(true);
    }
    v.push_back({1, 2});
    fl.push_back(false);
    for (int i = 0; i < m; ++i) {
        double a = pi / 2 + pi * i / m;
        v.push_back({-1 + std::cos(a), 1 + std::sin(a)});
        fl.push_back(true);
    }
    auto d = build_domain(v, fl, {}, std::nullopt);
    ASSERT_EQ(d.flat_parts().size(), 2u);
    for (const auto& fp : d.flat_parts()) {
        EXPECT_EQ(fp.junction_l, JunctionKind::Tangential);
        EXPECT_EQ(fp.junction_r, JunctionKind::Tangential);
        EXPECT_DOUBLE_EQ(fp.end_angle_l, pi);
        EXPECT_TRUE(fp.obtuse_l && fp.obtuse_r);
    }
}

TEST(Strip, SquareBottom) {
    auto d = square();
    auto s = strip_of(d, d.flat_parts()[0]);
    EXPECT_NEAR(s.s_l.length(), 1, 1e-12);
    EXPECT_NEAR(s.s_r.length(), 1, 1e-12);
    EXPECT_NEAR(s.s_l.b.x, 0, 1e-12);
    EXPECT_NEAR(s.s_r.b.y, 1, 1e-12);
}

TEST(Strip, RectangleBottomSidesLengthTwo) {
    auto d = rect(2.0);
    auto s = strip_of(d, d.flat_parts()[0]);
    EXPECT_NEAR(s.s_l.length(), 2, 1e-12);
    EXPECT_NEAR(s.s_r.length(), 2, 1e-12);
}

TEST(Strip, ObtuseTrapezoid) {
    auto d = build_domain({{0, 0}, {4, 0}, {5, 2}, {-1, 2}});
    const auto& fp = d.flat_parts()[0];
    EXPECT_TRUE(fp.obtuse_l && fp.obtuse_r);
    auto s = strip_of(d, fp);
    EXPECT_NEAR(s.s_l.length(), 2, 1e-9);
    EXPECT_NEAR(s.s_r.length(), 2, 1e-9);
    const Point n = fp.inward_normal();
    EXPECT_NEAR(std::abs(cross(unit(s.s_l.b - s.s_l.a), n)), 0, 1e-6);
}

TEST(Strip, TriangleAcuteEndsGiveDegenerateSides) {
    // triangle base (0,0)-(4,0), apex (1,3): both base angles acute, sides are points
    auto d = build_domain({{0, 0}, {4, 0}, {1, 3}});
    const auto& fp = d.flat_parts()[0];
    EXPECT_FALSE(fp.obtuse_l);
    auto s = strip_of(d, fp);
    EXPECT_NEAR(s.s_l.length(), 0, 1e-9);
    EXPECT_NEAR(s.s_r.length(), 0, 1e-9);
    // the strip of the slanted edge (4,0)-(1,3): perpendicular at (4,0) hits the opposite side
    const auto& f1 = d.flat_parts()[1];
    auto s1 = strip_of(d, f1);
    // inward normal of edge (4,0)->(1,3) is (-3,-3)/|.|; from (4,0) it meets y=0 only at (4,0)
    EXPECT_NEAR(s1.s_l.length(), 0, 1e-9);
    // from (1,3) with direction (-1,-1)/√2 it meets edge (1,3)-(0,0) at once: acute apex
    EXPECT_NEAR(s1.s_r.length(), 0, 1e-9);
}

TEST(HalfPlane, ContainsDomain) {
    auto d = build_domain({{0, 0}, {4, 0}, {5, 2}, {2, 4}, {-1, 2}});
    for (const auto& fp : d.flat_parts()) {
        auto h = half_plane(fp);
        for (const auto& v : d.vertices()) EXPECT_TRUE(h.contains(v, 1e-12));
    }
    auto sq = square();
    auto h = half_plane(sq.flat_parts()[0]);
    EXPECT_NEAR(h.normal.y, 1, 1e-12);
    EXPECT_NEAR(h.signed_distance({0.3, 0.7}), 0.7, 1e-12);
}

TEST(HalfPlane, AngledLineThroughOrigin) {
    const double a = pi / 6;
    auto d = build_domain({{0, 0}, {3, 0}, {3 * std::cos(a), 3 * std::sin(a)}});
    // ℓ₂ is the edge from (3cosα,3sinα) back to the origin
    const auto& l2 = d.flat_parts()[2];
    auto h = half_plane(l2);
    EXPECT_TRUE(h.contains({2, 0.1}));
    EXPECT_FALSE(h.contains({0, 1}));
}

TEST(Projection, OntoLine) {
    auto sq = square();
    const auto& bottom = sq.flat_parts()[0];
    auto p = project_onto_line({1, 1}, bottom);
    EXPECT_NEAR(p.x, 1, 1e-15);
    EXPECT_NEAR(p.y, 0, 1e-15);
    auto q = project_onto_line(p, bottom);
    EXPECT_EQ(p, q);

    const double a = pi / 6;
    auto d = build_domain({{0, 0}, {3, 0}, {3 * std::cos(a), 3 * std::sin(a)}});
    const double ak = 1.7;
    auto r = project_onto_line({ak, 0}, d.flat_parts()[2]);
    EXPECT_NEAR(r.x, ak * std::cos(a) * std::cos(a), 1e-12);
    EXPECT_NEAR(r.y, ak * std::cos(a) * std::sin(a), 1e-12);
}

TEST(Projection, OntoConvex) {
    auto sq = square();
    auto p = project_onto_convex({0.3, 0.4}, sq);
    EXPECT_EQ(p, (Point{0.3, 0.4}));
    p = project_onto_convex({0, 2}, sq);
    EXPECT_NEAR(p.x, 0, 1e-15);
    EXPECT_NEAR(p.y, 1, 1e-15);
    p = project_onto_convex({2, 2}, sq);
    EXPECT_NEAR(p.x, 1, 1e-15);
    EXPECT_NEAR(p.y, 1, 1e-15);
}

TEST(Projection, NonExpansive) {
    auto d = regular(7, 1.0, false);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
        EXPECT_LE(dist(project_onto_convex(x, d), project_onto_convex(y, d)), dist(x, y) + 1e-12);
    }
}

TEST(Domain, ArclengthRoundTrip) {
    auto d = rect(2.0);
    for (double s : {0.0, 0.5, 3.9, 5.0, 9.99, 11.0}) {
        EXPECT_NEAR(d.arclength_of(d.point_at(s)), s, 1e-12);
    }
    EXPECT_EQ(d.flat_part_at(1.0), 0);
    EXPECT_EQ(d.flat_part_at(5.0), 1);
}

TEST(Domain, FlatPartsAreMaximal) {
    auto d = build_domain({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {2, 2}, {0, 2}});
    for (const auto& fp : d.flat_parts()) {
        const Point before = d.edge(fp.first_edge - 1);
        const Point after = d.edge(fp.first_edge + fp.edge_count);
        EXPECT_GT(std::abs(cross(unit(before), fp.direction)), 1e-9);
        EXPECT_GT(std::abs(cross(unit(after), fp.direction)), 1e-9);
    }
}

TEST(Domain, Hausdorff) {
    auto a = square();
    auto b = build_domain({{0, 0}, {1, 0}, {1, 1.5}, {0, 1.5}});
    EXPECT_NEAR(hausdorff_distance(a, b), 0.5, 1e-12);
}
