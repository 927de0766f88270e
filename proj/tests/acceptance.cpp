// Acceptance suite: one line per criterion, nonzero exit when any criterion fails.
// Usage: acceptance <path to lgk>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "lgk/admissibility.hpp"
#include "lgk/envelopes.hpp"
#include "lgk/fixtures.hpp"
#include "lgk/hump_assembly.hpp"
#include "lgk/io.hpp"
#include "lgk/matching.hpp"
#include "lgk/oracle.hpp"
#include "lgk/solver.hpp"

using namespace lgk;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 101 × 51 points strictly inside (−L, L) × (0, 1)
std::vector<Point> co1_grid(double L) {
    std::vector<Point> g;
    for (int j = 1; j <= 51; ++j)
        for (int i = 1; i <= 101; ++i) g.push_back({-L + 2 * L * i / 102.0, j / 52.0});
    return g;
}

double sup_error(const std::function<double(const Point&)>& u, const std::function<double(const Point&)>& exact,
                 const std::vector<Point>& pts) {
    std::vector<double> e(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int i) { e[i] = std::abs(u(pts[i]) - exact(pts[i])); });
    return *std::max_element(e.begin(), e.end());
}

Outcome criterion1() {
    const double L = 2, lam = 0.5;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    auto f = fixtures::co1_data(dom, L, lam);
    // one core
    setenv("LGK_THREADS", "1", 1);
    const auto t0 = std::chrono::steady_clock::now();
    ContinuousOptions opt;
    opt.n_seq = {4, 8, 16, 32};
    opt.levels = 256;
    auto u = solve_continuous(dom, f, opt);
    const double err = sup_error(u, [&](const Point& p) { return fixtures::co1_solution(p, L, lam); }, co1_grid(L));
    const double t = seconds_since(t0);
    unsetenv("LGK_THREADS");
    return {err <= 2e-2 && t <= 30, fmt("sup error %.3e (<= 2e-2), %.1f s on one core (<= 30 s)", err, t)};
}

Outcome criterion2() {
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    const auto verdict = check_admissibility(fixtures::co1_data(dom, L, 1.0), dom).global;
    std::vector<double> lams;
    for (int j = 1; j <= 3; ++j) lams.push_back(1 - std::pow(10.0, -j));
    auto lim = solve_as_limit(dom, [&](double l) { return fixtures::co1_data(dom, L, l); }, lams);
    const double err = sup_error(lim.u, [&](const Point& p) { return fixtures::co1_solution(p, L, 1.0); }, co1_grid(L));
    return {verdict == Verdict::BoundaryCase && err <= 5e-2,
            fmt("checker says %s, sup error via lambda_j = 1 - 10^-j (j = 1..3) %.3e (<= 5e-2)", to_string(verdict), err)};
}

int run_check(const std::string& lgk, const io::Problem& p, const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("lgk_acceptance_" + tag);
    std::filesystem::create_directories(dir);
    io::write_atomic(dir / "problem.json", io::dump(io::to_json(p)));
    const std::string cmd = "\"" + lgk + "\" check --domain \"" + (dir / "problem.json").string() + "\" --out \"" +
                            dir.string() + "\" > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    std::filesystem::remove_all(dir);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome criterion3(const std::string& lgk) {
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    struct Case {
        std::string name;
        BoundaryFunction f;
        bool want_c2;
    };
    std::vector<Case> cases{{"co1b lambda=1.5", fixtures::co1_data(dom, L, 1.5), true},
                            {"co2a mu=5", fixtures::co2_data(dom, L, 5), true},
                            {"co2c mu=3", fixtures::co2_data(dom, L, 3), false}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto rep = check_admissibility(c.f, dom);
        bool certified = false;
        std::string cert;
        for (const auto& part : rep.parts) {
            if (part.verdict != Verdict::Fail) continue;
            if (c.want_c2) {
                for (const auto& h : part.humps)
                    if (h.verdict == Verdict::Fail && h.lhs > h.rhs) {
                        certified = true;
                        cert = std::isfinite(h.lhs) ? fmt("d_a + d_b = %.4g > |a - b| = %.4g", h.lhs, h.rhs)
                                                    : fmt("d_a + d_b = inf > |a - b| = %.4g", h.rhs);
                    }
            } else if (part.c1.verdict == Verdict::Fail && part.c1.breakpoint) {
                certified = true;
                const Point b = dom.point_at(*part.c1.breakpoint);
                cert = fmt("#1 breaks at (%.4g, %.4g)", b.x, b.y);
            }
        }
        const int code = run_check(lgk, {dom, c.f}, c.name.substr(0, 4));
        const bool pass = rep.global == Verdict::Fail && certified && code == 3;
        ok = ok && pass;
        detail += fmt("%s%s: %s, exit %d", detail.empty() ? "" : "; ", c.name.c_str(), cert.empty() ? "no certificate" : cert.c_str(), code);
    }
    return {ok, detail};
}

Outcome criterion4() {
    const double L = 2;
    auto dom = fixtures::RectangleExample{L, 1}.domain();
    auto f = fixtures::co2_data(dom, L, 2 * L);
    auto sw = solve_discontinuous(dom, f);
    double below = 0;
    for (const auto& p : probe_points(dom, 41)) below = std::max(below, sw.v(p) - sw.u(p));
    const auto& tr = sw.report.trace;
    double worst = 0, mean = 0, control = 0;
    std::function<double(const Point&)> exact = [&](const Point& p) { return fixtures::co2_fan_solution(p, L); };
    for (const auto& t : tr) {
        const double e = std::max(std::abs(t.tu - t.f), std::abs(t.tv - t.f));
        worst = std::max(worst, e);
        mean += e / tr.size();
        if (auto r = normal_trace(dom, exact, t.s, 1.0 / 128)) control = std::max(control, std::abs(r->value - t.f));
    }
    const bool pass = below <= 1e-6 * f.range() && tr.size() == 200 && worst <= 3e-2;
    return {pass, fmt("max(v - u) %.2e, %zu probes, max trace error %.3e (<= 3e-2), mean %.3e; exact solution under "
                      "the same probe: %.3e",
                      below, tr.size(), worst, mean, control)};
}

Outcome criterion5() {
    fixtures::InfiniteHumpExample ex;
    auto dom = ex.domain();
    auto f = ex.data(dom);
    const auto rep = check_admissibility(f, dom);
    int passing = 0, humps = 0;
    // the flat part through the accumulation point that carries the ℓ₁ humps comes first
    if (!rep.parts.empty()) {
        humps = static_cast<int>(rep.parts[0].humps.size());
        for (const auto& h : rep.parts[0].humps) passing += h.verdict == Verdict::Pass && h.lhs < h.rhs;
    }
    auto as = solve_infinite_humps(dom, f, 6);
    return {humps == 6 && passing == 6 && as.max_cut_mismatch <= 1e-9,
            fmt("%d of %d humps on the accumulating side pass #2, %zu pieces, cut mismatch %.2e (<= 1e-9)", passing, humps,
                as.pieces.size(), as.max_cut_mismatch)};
}

BoundaryFunction zigzag(std::mt19937_64& rng, double P) {
    std::uniform_real_distribution<double> U(0, 1);
    const int k = 6 + static_cast<int>(U(rng) * 12);
    std::vector<double> s{0};
    for (int i = 1; i < k; ++i) s.push_back(P * (i + 0.8 * (U(rng) - 0.5)) / k);
    s.push_back(P);
    std::vector<LinearSeg> segs;
    double v = 2 * U(rng) - 1;
    for (int i = 0; i < k; ++i) {
        if (i > 0 && U(rng) < 0.3) v = 2 * U(rng) - 1;  // jump
        const double w = 2 * U(rng) - 1;
        segs.push_back({s[i], s[i + 1], v, w});
        v = w;
    }
    if (U(rng) < 0.5) segs.back().v1 = segs.front().v0;
    return BoundaryFunction::from_segments(std::move(segs), P);
}

/// sup |f(a) − f(b)| over a, b in the continuity piece [p0, p1] with |a − b| ≤ r.
double piece_modulus(const BoundaryFunction& f, double p0, double p1, double r) {
    std::vector<double> starts{p0, std::max(p0, p1 - r)};
    for (const auto& g : f.segments())
        for (double k : {g.s0, g.s1})
            for (double a : {k, k - r})
                if (a >= p0 && a <= p1) starts.push_back(std::min(a, std::max(p0, p1 - r)));
    double w = 0;
    for (double a : starts) {
        const auto [lo, hi] = detail::window_range(f, a, std::min(a + r, p1));
        w = std::max(w, hi - lo);
    }
    return w;
}

Outcome criterion6() {
    std::mt19937_64 rng(6006);
    const double P = 4;
    const std::vector<int> ns{4, 8, 16, 32};
    int sandwich_bad = 0, order_bad = 0, bound_bad = 0, bound_checks = 0;
    double worst_ratio = 0;
    for (int z = 0; z < 100; ++z) {
        auto f = zigzag(rng, P);
        std::vector<double> xs;
        for (int i = 0; i < 400; ++i) xs.push_back(P * (i + 0.5) / 400);
        for (const auto& j : f.jumps())
            for (double d : {-1e-9, 1e-9}) xs.push_back(f.wrap(j.s + d));
        std::vector<std::vector<double>> g(ns.size(), std::vector<double>(xs.size())), h = g;
        parallel_for(static_cast<int>(xs.size()), [&](int i) {
            for (size_t k = 0; k < ns.size(); ++k) {
                g[k][i] = envelope_lower(f, ns[k], xs[i]);
                h[k][i] = envelope_upper(f, ns[k], xs[i]);
            }
        });
        for (size_t i = 0; i < xs.size(); ++i) {
            const double lo = std::min(f.left_limit(xs[i]), f.right_limit(xs[i]));
            const double hi = std::max(f.left_limit(xs[i]), f.right_limit(xs[i]));
            for (size_t k = 0; k < ns.size(); ++k) {
                if (g[k][i] > lo + 1e-12 || h[k][i] < hi - 1e-12) ++sandwich_bad;
                if (k > 0 && (g[k][i] < g[k - 1][i] - 1e-12 || h[k][i] > h[k - 1][i] + 1e-12)) ++order_bad;
            }
        }
        // 20 continuity probes at least 2/32 from every jump
        std::vector<double> jumps;
        for (const auto& j : f.jumps()) jumps.push_back(j.s);
        std::uniform_real_distribution<double> U(0, P);
        int probes = 0;
        for (int tries = 0; probes < 20 && tries < 100000; ++tries) {
            const double x = U(rng);
            double p0 = x - P, p1 = x + P;  // continuity piece around x
            bool near = false;
            for (double j : jumps)
                for (double jj : {j - P, j, j + P}) {
                    if (std::abs(jj - x) < 2.0 / 32) near = true;
                    if (jj <= x) p0 = std::max(p0, jj);
                    if (jj > x) p1 = std::min(p1, jj);
                }
            if (near) continue;
            if (jumps.empty()) p0 = x - P / 2, p1 = x + P / 2;
            ++probes;
            ++bound_checks;
            const double bound = 2 * piece_modulus(f, p0, p1, 2.0 / 32) + 1e-9;
            const double dev = std::abs(envelope_lower(f, 32, x) - f(x));
            worst_ratio = std::max(worst_ratio, dev / bound);
            if (dev > bound) ++bound_bad;
        }
    }
    return {sandwich_bad == 0 && order_bad == 0 && bound_bad == 0 && bound_checks == 2000,
            fmt("100 zigzags: %d sandwich breaches, %d monotonicity breaches, %d of %d probes above 2 w(2/32) + 1e-9 "
                "(worst ratio %.3f)",
                sandwich_bad, order_bad, bound_bad, bound_checks, worst_ratio)};
}

Outcome criterion7() {
    std::vector<std::pair<std::string, ConvexDomain>> doms{
        {"disk", fixtures::disk(1.0, 256)}, {"ellipse", fixtures::ellipse(1.2, 0.7, 256)}, {"egg", fixtures::egg(256)}};
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> U(-1, 1);
    int violations = 0, pairs = 0;
    double worst = -INFINITY;
    for (int k = 0; k < 50; ++k) {
        const auto& dom = doms[k % 3].second;
        const double a = U(rng), b = U(rng), c = U(rng), w = 1 + 2 * std::abs(U(rng));
        const Point q{0.5 * U(rng), 0.5 * U(rng)};
        const double lift = 0.05 + 0.3 * std::abs(U(rng));
        auto g1 = [=](const Point& p) { return a * p.x + b * p.y + c * std::sin(w * p.x + p.y); };
        auto g2 = [=](const Point& p) { return g1(p) + lift * std::exp(-dist(p, q) * dist(p, q)); };
        auto f1 = sample_boundary(dom, g1, 0.01), f2 = sample_boundary(dom, g2, 0.01);
        auto u1 = solve_continuous(dom, f1), u2 = solve_continuous(dom, f2);
        const auto pts = probe_points(dom, 21);
        std::vector<double> d(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int i) { d[i] = u1(pts[i]) - u2(pts[i]); });
        for (double x : d) {
            worst = std::max(worst, x);
            if (x > 1e-6) ++violations;
        }
        ++pairs;
    }
    return {violations == 0 && pairs == 50,
            fmt("%d pairs on disk, ellipse, egg: %d probe violations of u1 <= u2 + 1e-6 (max u1 - u2 = %.2e)", pairs,
                violations, worst)};
}

Outcome criterion8() {
    std::mt19937_64 rng(8008);
    std::uniform_real_distribution<double> U(0, 1);
    int ok = 0;
    double worst64 = 0;
    std::string bad;
    for (int k = 0; k < 10; ++k) {
        // 24 points on a rotated ellipse: a strictly convex polygon, read as samples of a smooth curve
        const double ax = 0.6 + 0.3 * U(rng), by = 0.4 + 0.3 * U(rng), rot = std::numbers::pi * U(rng);
        std::vector<double> ang;
        for (int i = 0; i < 24; ++i) ang.push_back(2 * std::numbers::pi * (i + 0.8 * (U(rng) - 0.5)) / 24);
        std::vector<Point> chain;
        for (double t : ang) {
            const Point e{ax * std::cos(t), by * std::sin(t)};
            chain.push_back({e.x * std::cos(rot) - e.y * std::sin(rot), e.x * std::sin(rot) + e.y * std::cos(rot)});
        }
        auto dom = build_domain(chain, std::vector<bool>(24, true));
        const double th = 2 * std::numbers::pi * U(rng), slope = 1 + 2 * U(rng);
        auto f = sample_boundary(dom, [=](const Point& p) { return std::tanh(slope * (p.x * std::cos(th) + p.y * std::sin(th))); }, 0.01);
        auto u = solve_continuous(dom, f);
        double gap[2];
        for (int r = 0; r < 2; ++r) {
            auto sol = oracle_solve(dom, f, {.h = r == 0 ? 1.0 / 64 : 1.0 / 128, .levels = 256, .nesting = NestingMode::Relaxed});
            gap[r] = compare(sol.u, sample_on(sol.u, [&](const Point& p) { return u(p); })).l1;
        }
        worst64 = std::max(worst64, gap[0]);
        if (gap[0] <= 5e-2 && gap[1] < gap[0])
            ++ok;
        else
            bad += fmt(" #%d(%.3e, %.3e)", k, gap[0], gap[1]);
    }
    return {ok == 10, fmt("%d of 10 polygons: mean L1 gap <= 5e-2 at h = 1/64 (worst %.3e) and smaller at h = 1/128%s",
                          ok, worst64, bad.c_str())};
}

void enumerate(std::vector<int>& partner, const std::vector<Point>& pts, const std::vector<int>& sign, double& best,
               std::vector<int>& best_partner) {
    int i = 0;
    while (i < static_cast<int>(partner.size()) && partner[i] >= 0) ++i;
    if (i == static_cast<int>(partner.size())) {
        double cost = 0;
        for (int a = 0; a < static_cast<int>(partner.size()); ++a)
            if (partner[a] > a) cost += dist(pts[a], pts[partner[a]]);
        if (cost < best) {
            best = cost;
            best_partner = partner;
        }
        return;
    }
    for (int k = i + 1; k < static_cast<int>(partner.size()); ++k) {
        if (partner[k] >= 0 || sign[i] == sign[k]) continue;
        bool crosses = false;
        for (int a = 0; a < static_cast<int>(partner.size()) && !crosses; ++a) {
            const int b = partner[a];
            if (b < 0 || b < a) continue;
            crosses = (a > i && a < k) != (b > i && b < k);
        }
        if (crosses) continue;
        partner[i] = k;
        partner[k] = i;
        enumerate(partner, pts, sign, best, best_partner);
        partner[i] = partner[k] = -1;
    }
}

Outcome criterion9() {
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> U(0, 1);
    int exact = 0;
    for (int cfg = 0; cfg < 200; ++cfg) {
        const int m = 2 * (1 + cfg % 3);
        std::vector<double> ang(m);
        for (auto& a : ang) a = 2 * std::numbers::pi * U(rng);
        std::sort(ang.begin(), ang.end());
        std::vector<Point> pts;
        const double ax = 0.5 + U(rng), by = 0.5 + U(rng);
        for (double a : ang) pts.push_back({ax * std::cos(a), by * std::sin(a)});
        std::vector<int> sign(m);
        for (int i = 0; i < m; ++i) sign[i] = i < m / 2 ? 1 : -1;
        std::shuffle(sign.begin(), sign.end(), rng);
        auto dp = min_noncrossing_matching(pts, sign);
        std::vector<int> partner(m, -1), best_partner;
        double best = INFINITY;
        enumerate(partner, pts, sign, best, best_partner);
        std::vector<int> dp_partner(m, -1);
        for (auto [i, k] : dp.pairs) dp_partner[i] = k, dp_partner[k] = i;
        double dp_cost = 0;
        for (int a = 0; a < m; ++a)
            if (dp_partner[a] > a) dp_cost += dist(pts[a], pts[dp_partner[a]]);
        if (dp_partner == best_partner && dp_cost == best) ++exact;
    }
    return {exact == 200, fmt("%d of 200 configurations with m in {2, 4, 6} match the exhaustive optimum exactly", exact)};
}

Outcome criterion10() {
    struct Fixture {
        std::string name;
        ConvexDomain dom;
        std::function<double(const Point&)> g;
    };
    std::vector<Fixture> fx{
        {"rectangle co1a", fixtures::RectangleExample{2, 1}.domain(), nullptr},
        {"hexagon", fixtures::regular_polygon(6, 1.0, false), [](const Point& p) { return p.x + 0.3 * p.y; }},
        {"disk", fixtures::disk(1.0, 256), [](const Point& p) { return p.x / norm(p); }},
    };
    std::mt19937_64 rng(10010);
    int violations = 0, checks = 0;
    std::string detail;
    for (auto& x : fx) {
        auto f = x.g ? sample_boundary(x.dom, x.g, 0.01) : fixtures::co1_data(x.dom, 2, 0.5);
        auto u = solve_continuous(x.dom, f);
        const auto mc = modulus_constants(x.dom);
        EuclideanModulus omega(f, x.dom);
        const auto pts = probe_points(x.dom, 61);
        std::uniform_int_distribution<size_t> pick(0, pts.size() - 1);
        std::vector<std::pair<Point, Point>> pairs;
        for (int k = 0; k < 500; ++k) pairs.push_back({pts[pick(rng)], pts[pick(rng)]});
        std::vector<double> excess(pairs.size());
        parallel_for(500, [&](int k) {
            const auto [a, b] = pairs[k];
            const double r = dist(a, b);
            excess[k] = std::abs(u(a) - u(b)) - 1.01 * omega(r / mc.A + std::sqrt(r) / mc.B);
        });
        int v = 0;
        for (double e : excess) v += e > 0;
        violations += v;
        checks += 500;
        detail += fmt("%s%s A = %.3g B = %.3g: %d", detail.empty() ? "" : "; ", x.name.c_str(), mc.A, mc.B, v);
    }
    return {violations == 0 && checks == 1500, fmt("violations per fixture (500 pairs each, 1%% slack): %s", detail.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string lgk = argc > 1 ? argv[1] : "lgk";
    std::vector<std::function<Outcome()>> criteria{
        criterion1, criterion2, [&] { return criterion3(lgk); }, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10,
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s (%s) [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
