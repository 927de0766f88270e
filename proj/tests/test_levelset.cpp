#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lgk/fixtures.hpp"
#include "lgk/levelset.hpp"

using namespace lgk;

TEST(LevelSet, ConstantDataGivesConstantSolution) {
    auto d = fixtures::disk(1.0, 64);
    auto f = sample_boundary(d, [](const Point&) { return 2.5; }, 0.1);
    auto u = solve_strictly_convex(d, f);
    for (const auto& c : u.cuts) EXPECT_TRUE(c.chords.empty());
    EXPECT_DOUBLE_EQ(u({0.1, 0.2}), 2.5);
}

TEST(LevelSet, DiskCosineIsLinear) {
    auto d = fixtures::disk(1.0, 256);
    auto f = sample_boundary(d, [](const Point& p) { return p.x; }, 0.02);
    auto u = solve_strictly_convex(d, f, {.levels = 64});
    for (const auto& c : u.cuts) {
        int long_chords = 0;
        for (const auto& ch : c.chords) {
            if (ch.length() < 1e-9) continue;
            ++long_chords;
            EXPECT_NEAR(ch.p.x, ch.q.x, 1e-9);
        }
        EXPECT_LE(long_chords, 1);
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-0.95, 0.95);
    double err = 0;
    for (int i = 0; i < 200; ++i) {
        Point x{U(rng), U(rng)};
        if (norm(x) > 0.97) continue;
        err = std::max(err, std::abs(u(x) - x.x));
    }
    EXPECT_LE(err, 1e-5);
}

TEST(LevelSet, TwoSeparatedArcsGiveParallelChords) {
    // x² on the disk: horizontal chord pairs below 1/2, vertical pairs above, a fat square at 1/2
    auto d = fixtures::disk(1.0, 256);
    auto f = sample_boundary(d, [](const Point& p) { return p.x * p.x; }, 0.02);
    auto u = solve_strictly_convex(d, f, {.levels = 32});
    for (const auto& c : u.cuts) {
        if (c.chords.size() != 2) continue;
        EXPECT_FALSE(segments_cross_properly(c.chords[0].p, c.chords[0].q, c.chords[1].p, c.chords[1].q, 0));
    }
    EXPECT_NEAR(u({0.9, 0.0}), 0.81, 1e-5);
    EXPECT_NEAR(u({0.0, 0.9}), 0.19, 5e-4);  // data interpolated on a 256-gon
    EXPECT_NEAR(u({0.3, 0.3}), 0.5, 1e-5);
}

TEST(LevelSet, NestingAndMaximumPrinciple) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    auto d = fixtures::ellipse(1.5, 1.0, 200);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = U(rng), b = U(rng), c = U(rng);
        auto f = sample_boundary(d, [&](const Point& p) { return std::sin(3 * p.x + a) + b * p.y * p.y + c * p.x * p.y; }, 0.02);
        auto u = solve_strictly_convex(d, f, {.levels = 48});
        std::vector<Point> pts;
        for (int i = 0; i < 60; ++i) {
            Point x{1.4 * U(rng), 0.9 * U(rng)};
            if (d.contains(x, -1e-3)) pts.push_back(x);
        }
        for (const auto& x : pts) {
            bool prev = true;
            for (size_t k = 0; k < u.cuts.size(); ++k) {
                const bool in = u.member(static_cast<int>(k), x);
                EXPECT_TRUE(prev || !in) << "level " << k;
                prev = in;
            }
            const double v = u(x);
            EXPECT_GE(v, f.min() - 1e-12);
            EXPECT_LE(v, f.max() + 1e-12);
        }
    }
}

TEST(LevelSet, TranslationEquivariance) {
    auto d = fixtures::ellipse(1.5, 1.0, 120);
    auto f = sample_boundary(d, [](const Point& p) { return std::sin(2 * p.x) + p.y; }, 0.05);
    std::vector<LinearSeg> g;
    for (auto s : f.segments()) g.push_back({s.s0, s.s1, s.v0 + 3, s.v1 + 3});
    auto f3 = BoundaryFunction::from_segments(g, f.period());
    auto u = solve_strictly_convex(d, f, {.levels = 32});
    auto w = solve_strictly_convex(d, f3, {.levels = 32});
    for (Point x : {Point{0.2, 0.1}, Point{-0.7, 0.4}, Point{1.0, -0.3}}) EXPECT_NEAR(w(x), u(x) + 3, 1e-6);
}

TEST(LevelSet, PlateauMakesFatRegion) {
    // plateau at the top of a disk: the region under it takes the plateau value
    auto d = fixtures::disk(1.0, 256);
    auto f = sample_boundary(d, [](const Point& p) { return std::min(p.y, 0.5); }, 0.02);
    auto u = solve_strictly_convex(d, f, {.levels = 32});
    ASSERT_FALSE(u.fat_regions.empty());
    EXPECT_NEAR(u.fat_regions[0].value, 0.5, 1e-12);
    EXPECT_NEAR(u({0.0, 0.7}), 0.5, 1e-12);
    EXPECT_NEAR(u({0.0, -0.2}), -0.2, 1e-4);
    // the chord sits where the interpolated data first reaches 1/2
    const auto& top = u.cuts.back();
    ASSERT_EQ(top.chords.size(), 1u);
    const double y0 = top.chords[0].p.y;
    EXPECT_NEAR(std::abs(polygon_area(u.fat_regions[0].polygon)), std::acos(y0) - y0 * std::sqrt(1 - y0 * y0), 1e-3);
}

TEST(LevelSet, CoareaTVMatchesLinearCase) {
    auto d = fixtures::disk(1.0, 512);
    auto f = sample_boundary(d, [](const Point& p) { return p.x; }, 0.01);
    auto u = solve_strictly_convex(d, f, {.levels = 128});
    EXPECT_NEAR(u.tv_coarea(), std::numbers::pi, 2e-3);  // area of the unit disk times |∇x|
}
