#include <gtest/gtest.h>

#include <cmath>

#include "lgk/admissibility.hpp"
#include "lgk/fixtures.hpp"

using namespace lgk;

namespace {

const FlatPartReport& part(const AdmissibilityReport& r, int id) { return r.parts.at(id); }

// Dense-sampling witness search used as an independent cross-check of d_a + d_b.
double brute_lhs(const BoundaryFunction& f, const ConvexDomain& dom, const Hump& h, int samples) {
    double da = INFINITY, db = INFINITY;
    const double P = dom.perimeter();
    const double tol = 1e-9;
    for (int k = 0; k <= samples; ++k) {
        const double s = P * k / samples;
        double su = s;
        while (su < h.s_a) su += P;
        if (su > h.s_a + tol && su < h.s_b - tol) continue;
        if (std::abs(su - h.s_a) <= tol || std::abs(su - h.s_b) <= tol) continue;
        if (std::abs(f(s) - h.value) > 1e-9) continue;
        const Point p = dom.point_at(s);
        da = std::min(da, dist(p, h.a));
        db = std::min(db, dist(p, h.b));
    }
    return da + db;
}

}  // namespace

TEST(Condition1, LinearPasses) {
    auto dom = fixtures::unit_square();
    auto f = sample_boundary(dom, [](const Point& p) { return p.x * p.x + p.y; }, 0.1);
    auto r = check_condition1_continuous(f, dom.flat_parts()[0]);
    EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Condition1, Co1PlateauFailsMonotonicity) {
    auto dom = fixtures::RectangleExample{2, 1}.domain();
    auto f = fixtures::co1_data(dom, 2, 0.5);
    EXPECT_EQ(check_condition1_continuous(f, dom.flat_parts()[0]).verdict, Verdict::Fail);
    // h = x + L on the top edge is monotone
    auto v = fixtures::co2_data(dom, 2, 4);
    EXPECT_TRUE(monotone_on(v, dom.flat_parts()[2].s_a, dom.flat_parts()[2].s_b).monotone);
}

TEST(Condition1, DiscontinuousVariants) {
    auto dom = fixtures::RectangleExample{2, 1}.domain();
    auto v = fixtures::co2_data(dom, 2, 4);
    auto right = check_condition1_discontinuous(v, dom.flat_parts()[1]);
    EXPECT_EQ(right.verdict, Verdict::Pass);
    EXPECT_EQ(right.variant, Condition::C1DiscII);
    ASSERT_TRUE(right.x0);
    EXPECT_NEAR(right.x0->x, 2, 1e-12);
    EXPECT_NEAR(right.x0->y, 0, 1e-12);
    auto top = check_condition1_discontinuous(v, dom.flat_parts()[2]);
    EXPECT_EQ(top.variant, Condition::C1DiscI);

    auto v3 = fixtures::co2_data(dom, 2, 3);
    auto bad = check_condition1_discontinuous(v3, dom.flat_parts()[2]);
    EXPECT_EQ(bad.verdict, Verdict::Fail);
    EXPECT_TRUE(bad.breakpoint.has_value());

    // monotone across both junctions with a jump at each end: (iii)
    auto sq = fixtures::unit_square();
    auto g = sample_boundary(
        sq,
        [](const Point& p, int e) {
            switch (e) {
                case 0: return 1 + p.x;  // bottom 1..2
                case 1: return 3 + p.y;  // right 3..4
                case 2: return 4.0;
                default: return 0.5 - 0.5 * p.y;  // left rises to 0.5 toward (0,0)
            }
        },
        0.1);
    auto r = check_condition1_discontinuous(g, sq.flat_parts()[0]);
    EXPECT_EQ(r.variant, Condition::C1DiscIII);

    // non-monotone on ℓ
    auto h = fixtures::co1_data(dom, 2, 0.5);
    EXPECT_THROW(check_condition1_discontinuous(h, dom.flat_parts()[0]), Error);
}

TEST(Condition2, Co1VerdictsAcrossLambda) {
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    struct Case { double lambda; Verdict want; };
    for (auto [lambda, want] : {Case{0.5, Verdict::Pass}, Case{1.0, Verdict::BoundaryCase}, Case{1.5, Verdict::Fail}}) {
        auto f = fixtures::co1_data(dom, L, lambda);
        auto rep = check_admissibility(f, dom);
        const auto& bottom = part(rep, 0);
        ASSERT_EQ(bottom.humps.size(), 1u);
        const auto& hc = bottom.humps[0];
        EXPECT_NEAR(hc.d_a, 1.0, 1e-12);
        EXPECT_NEAR(hc.d_b, 1.0, 1e-12);
        EXPECT_NEAR(hc.rhs, 2 * (L - lambda), 1e-12);
        EXPECT_TRUE(hc.witnesses_off_l);
        EXPECT_NEAR(hc.y->y, 1.0, 1e-12);
        EXPECT_EQ(hc.verdict, want) << lambda;
        EXPECT_EQ(rep.global, want) << lambda;
        // the zero vertical edges are monotone
        for (int id : {1, 3}) {
            EXPECT_EQ(part(rep, id).condition, Condition::C1Continuous);
            EXPECT_EQ(part(rep, id).verdict, Verdict::Pass);
        }
        // independent dense search agrees
        EXPECT_NEAR(brute_lhs(f, dom, hc.hump, 200000), hc.lhs, 1e-3);
    }
}

TEST(Condition2, Co2Verdicts) {
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    {
        auto rep = check_admissibility(fixtures::co2_data(dom, L, 2 * L), dom);
        EXPECT_EQ(rep.global, Verdict::Pass);
        EXPECT_EQ(part(rep, 0).condition, Condition::C1DiscII);
        EXPECT_EQ(part(rep, 1).condition, Condition::C1DiscII);
        EXPECT_EQ(part(rep, 2).condition, Condition::C1DiscI);
        EXPECT_EQ(part(rep, 3).condition, Condition::C1DiscI);
    }
    {
        auto rep = check_admissibility(fixtures::co2_data(dom, L, 5), dom);
        EXPECT_EQ(rep.global, Verdict::Fail);
        const auto& right = part(rep, 1);
        EXPECT_EQ(right.condition, Condition::C2);
        ASSERT_EQ(right.humps.size(), 1u);
        EXPECT_TRUE(std::isinf(right.humps[0].d_a));
        EXPECT_EQ(right.humps[0].verdict, Verdict::Fail);
    }
    {
        auto rep = check_admissibility(fixtures::co2_data(dom, L, 3), dom);
        EXPECT_EQ(rep.global, Verdict::Fail);
        const auto& top = part(rep, 2);
        EXPECT_EQ(top.verdict, Verdict::Fail);
        EXPECT_TRUE(top.c1.breakpoint.has_value());
        EXPECT_NE(top.certificate.find("#1"), std::string::npos);
    }
}

TEST(Condition2, StrictExtremumFails) {
    auto dom = fixtures::unit_square();
    auto f = sample_boundary(dom, [](const Point& p) { return p.y == 0 ? 0.5 - std::abs(p.x - 0.5) : 0.0; }, 0.05);
    auto rep = check_admissibility(f, dom);
    EXPECT_EQ(part(rep, 0).verdict, Verdict::Fail);
    ASSERT_FALSE(part(rep, 0).strict_extrema.empty());
    EXPECT_NEAR(part(rep, 0).strict_extrema[0], 0.5, 1e-12);
}

TEST(Condition2, InvariantUnderAffineValueChange) {
    auto dom = fixtures::RectangleExample{2, 1}.domain();
    for (double lambda : {0.5, 1.0, 1.5}) {
        auto f = fixtures::co1_data(dom, 2, lambda);
        std::vector<LinearSeg> g;
        for (auto s : f.segments()) g.push_back({s.s0, s.s1, -2.5 * s.v0 + 1, -2.5 * s.v1 + 1});
        auto f2 = BoundaryFunction::from_segments(g, f.period());
        EXPECT_EQ(check_admissibility(f, dom).global, check_admissibility(f2, dom).global);
    }
}

TEST(Condition2, MirrorInvariance) {
    // reflect the domain x → −x; the chain is reversed by build_domain, verdicts must not change
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    auto mirrored = build_domain({{L, 0}, {-L, 0}, {-L, 1}, {L, 1}});
    for (double lambda : {0.5, 1.0, 1.5}) {
        auto a = check_admissibility(fixtures::co1_data(dom, L, lambda), dom);
        auto b = check_admissibility(fixtures::co1_data(mirrored, L, lambda), mirrored);
        EXPECT_EQ(a.global, b.global);
    }
}

TEST(Structural, NoFlatPartsIsVacuous) {
    auto d = fixtures::disk(1.0, 64);
    auto f = sample_boundary(d, [](const Point& p) { return p.x; }, 0.1);
    auto rep = check_admissibility(f, d);
    EXPECT_TRUE(rep.parts.empty());
    auto s = structural_checks(f, d, rep);
    EXPECT_FALSE(s.contradiction);
}

TEST(Structural, TwoHumpsOnObtuseEndedPartContradict) {
    auto dom = build_domain({{0, 0}, {4, 0}, {5, 2}, {-1, 2}});
    auto f = sample_boundary(dom, [](const Point&) { return 0.0; }, 0.5);
    AdmissibilityReport rep;
    FlatPartReport pr;
    pr.flat_part = 0;
    pr.condition = Condition::C2;
    for (double x : {0.5, 2.5}) {
        HumpCheck hc;
        hc.hump.flat_part = 0;
        hc.hump.a = {x, 0};
        hc.hump.b = {x + 1, 0};
        hc.y = Point{x, 2};
        hc.z = Point{x + 1, 2};
        hc.verdict = Verdict::Pass;
        pr.humps.push_back(hc);
    }
    rep.parts.push_back(pr);
    auto s = structural_checks(f, dom, rep);
    EXPECT_TRUE(s.contradiction);
}

TEST(Structural, ObtuseSingleHumpIsFine) {
    auto dom = build_domain({{0, 0}, {4, 0}, {5, 2}, {-1, 2}});
    auto f = sample_boundary(dom, [](const Point&) { return 0.0; }, 0.5);
    AdmissibilityReport rep;
    FlatPartReport pr;
    pr.flat_part = 0;
    pr.condition = Condition::C2;
    HumpCheck hc;
    hc.hump.a = {1, 0};
    hc.hump.b = {3, 0};
    hc.y = Point{-0.5, 1};
    hc.z = Point{4.5, 1};
    hc.verdict = Verdict::Pass;
    pr.humps.push_back(hc);
    rep.parts.push_back(pr);
    EXPECT_FALSE(structural_checks(f, dom, rep).contradiction);
}
