#pragma once

// Grid verifier: per-level minimum cuts on an 8-neighbour graph, reassembled by layer cake.

#include <algorithm>
#include <array>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>
#include <boost/graph/strong_components.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lgk/boundary_data.hpp"
#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"
#include "lgk/parallel.hpp"

namespace lgk {

/// Cell-centred scalar field; `mask` marks cells of Ω, values elsewhere are NaN.
struct GridFunction {
    double x0 = 0, y0 = 0;  // centre of cell (0, 0)
    double hx = 1, hy = 1;
    int nx = 0, ny = 0;
    std::vector<char> mask;
    std::vector<double> u;

    int index(int i, int j) const { return j * nx + i; }
    Point center(int i, int j) const { return {x0 + i * hx, y0 + j * hy}; }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny && mask[index(i, j)]; }
    int count() const { return static_cast<int>(std::count(mask.begin(), mask.end(), 1)); }
};

/// Interior cells and ghost-pinned boundary values for one cell size.
struct GridProblem {
    GridFunction grid;          // mask = interior cells, u unused
    std::vector<double> ghost;  // f at the nearest boundary point, NaN where not a ghost
    double w_axis = 0, w_diag = 0;
    double f_min = 0, f_max = 0;
    int reach = 0;                   // depth of `outer` beyond the grid
    std::vector<double> outer;       // f at the nearest boundary point for every exterior cell of the
                                     // grid widened by `reach`, NaN on interior cells

    /// Boundary value seen from exterior cell (i, j), which may lie up to `reach` cells off the grid.
    double outer_at(int i, int j) const {
        const int w = grid.nx + 2 * reach;
        if (i < -reach || j < -reach || i >= grid.nx + reach || j >= grid.ny + reach)
            return std::numeric_limits<double>::quiet_NaN();
        return outer[static_cast<size_t>(j + reach) * w + (i + reach)];
    }
};

enum class NestingMode { Sequential, Relaxed };

struct OracleOptions {
    double h = 1.0 / 64;
    int levels = 256;
    NestingMode nesting = NestingMode::Sequential;
};

/// Oblique chords leave ties between staircase cuts. Each level therefore yields the smallest and the
/// largest minimum cut; `lower` and `upper` are their layer cakes and `u` is their mean, which is again a
/// minimizer of the discrete energy.
struct OracleSolution {
    GridFunction u, lower, upper;
    std::vector<double> levels;
    std::vector<double> cut_cost;                     // weighted cut per level, ghost edges included
    std::vector<std::vector<char>> level_sets;        // smallest E_t per level on the grid
    std::vector<std::vector<char>> level_sets_upper;  // largest E_t per level
};

namespace detail {

inline constexpr int kNbr[8][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
inline constexpr int kFineRadius = 4;  // tie-breaking stencil

}  // namespace detail

/// Cells whose centre lies in Ω, with one ring of ghost cells around them.
inline GridProblem make_grid_problem(const ConvexDomain& dom, const BoundaryFunction& f, double h) {
    if (!(h > 0) || h > dom.diameter() / 16)
        throw Error(ErrorKind::BadInput, "cell size must lie in (0, diam/16]");
    GridProblem gp;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& v : dom.vertices()) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    auto& g = gp.grid;
    g.hx = g.hy = h;
    // one spare column/row on each side holds the ghosts
    const int i0 = static_cast<int>(std::floor(xmin / h)) - 1, i1 = static_cast<int>(std::ceil(xmax / h)) + 1;
    const int j0 = static_cast<int>(std::floor(ymin / h)) - 1, j1 = static_cast<int>(std::ceil(ymax / h)) + 1;
    g.nx = i1 - i0 + 1;
    g.ny = j1 - j0 + 1;
    g.x0 = (i0 + 0.5) * h;
    g.y0 = (j0 + 0.5) * h;
    g.mask.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    g.u.assign(g.mask.size(), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) g.mask[g.index(i, j)] = dom.contains(g.center(i, j)) ? 1 : 0;
    if (g.count() == 0) throw Error(ErrorKind::DisconnectedMask, "no cell centre lies inside the domain");

    // connectivity over the 8-neighbourhood
    std::vector<char> seen(g.mask.size(), 0);
    std::vector<int> stack;
    const int start = static_cast<int>(std::find(g.mask.begin(), g.mask.end(), 1) - g.mask.begin());
    stack.push_back(start);
    seen[start] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        ++reached;
        const int i = c % g.nx, j = c / g.nx;
        for (const auto& d : detail::kNbr)
            if (g.inside(i + d[0], j + d[1]) && !seen[g.index(i + d[0], j + d[1])]) {
                seen[g.index(i + d[0], j + d[1])] = 1;
                stack.push_back(g.index(i + d[0], j + d[1]));
            }
    }
    if (reached != g.count()) throw Error(ErrorKind::DisconnectedMask, "interior cells form more than one component");

    const double scale = f.period() / dom.perimeter();
    gp.ghost.assign(g.mask.size(), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (g.inside(i, j)) continue;
            bool near = false;
            for (const auto& d : detail::kNbr) near = near || g.inside(i + d[0], j + d[1]);
            if (near) gp.ghost[g.index(i, j)] = f(dom.arclength_of(g.center(i, j)) * scale);
        }
    gp.reach = detail::kFineRadius;
    const int wx = g.nx + 2 * gp.reach, wy = g.ny + 2 * gp.reach;
    gp.outer.assign(static_cast<size_t>(wx) * wy, std::numeric_limits<double>::quiet_NaN());
    for (int j = -gp.reach; j < g.ny + gp.reach; ++j)
        for (int i = -gp.reach; i < g.nx + gp.reach; ++i) {
            if (g.inside(i, j)) continue;
            const Point c{g.x0 + i * h, g.y0 + j * h};
            const double gv = i >= 0 && j >= 0 && i < g.nx && j < g.ny && !std::isnan(gp.ghost[g.index(i, j)])
                                  ? gp.ghost[g.index(i, j)]
                                  : f(dom.arclength_of(c) * scale);
            gp.outer[static_cast<size_t>(j + gp.reach) * wx + (i + gp.reach)] = gv;
        }
    // Cauchy-Crofton: each of the 4 line families covers π/4 of directions
    gp.w_axis = h * std::numbers::pi / 8;
    gp.w_diag = h * std::numbers::pi / (8 * std::numbers::sqrt2);
    gp.f_min = f.min();
    gp.f_max = f.max();
    return gp;
}

namespace detail {

/// Directed flow network with paired edges.
template <class Cap>
class BasicFlowNet {
public:
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS, boost::no_property,
                                        boost::property<boost::edge_index_t, std::size_t>>;
    using Edge = Graph::edge_descriptor;

    explicit BasicFlowNet(int nodes = 0) : graph_(nodes) {}

    int nodes() const { return static_cast<int>(boost::num_vertices(graph_)); }

    /// Adds a→b and b→a; returns the index of a→b, the reverse edge has the next index.
    std::size_t add_pair(int a, int b, Cap cab, Cap cba) {
        const std::size_t i = cap_.size();
        const auto e1 = boost::add_edge(a, b, i, graph_).first;
        const auto e2 = boost::add_edge(b, a, i + 1, graph_).first;
        cap_.push_back(cab);
        cap_.push_back(cba);
        rev_.push_back(e2);
        rev_.push_back(e1);
        from_.push_back(a);
        from_.push_back(b);
        to_.push_back(b);
        to_.push_back(a);
        return i;
    }

    Cap& cap(std::size_t i) { return cap_[i]; }
    Cap residual(std::size_t i) const { return res_[i]; }
    int from(std::size_t i) const { return from_[i]; }
    int to(std::size_t i) const { return to_[i]; }
    std::size_t edges() const { return cap_.size(); }

    Cap solve(int s, int t) {
        const auto n = boost::num_vertices(graph_);
        res_.assign(cap_.size(), Cap{});
        pred_.resize(n);
        color_.resize(n);
        distance_.resize(n);
        auto eidx = boost::get(boost::edge_index, graph_);
        return boost::boykov_kolmogorov_max_flow(
            graph_, boost::make_iterator_property_map(cap_.begin(), eidx),
            boost::make_iterator_property_map(res_.begin(), eidx), boost::make_iterator_property_map(rev_.begin(), eidx),
            pred_.data(), color_.data(), distance_.data(), boost::get(boost::vertex_index, graph_), s, t);
    }

    /// Push-relabel alternative to solve(); read the cut with reach().
    Cap solve_push_relabel(int s, int t) {
        res_.assign(cap_.size(), Cap{});
        auto eidx = boost::get(boost::edge_index, graph_);
        return boost::push_relabel_max_flow(graph_, s, t, boost::make_iterator_property_map(cap_.begin(), eidx),
                                            boost::make_iterator_property_map(res_.begin(), eidx),
                                            boost::make_iterator_property_map(rev_.begin(), eidx),
                                            boost::get(boost::vertex_index, graph_));
    }

    /// Nodes reachable from `root` in the residual graph, or reaching it when `backward`.
    std::vector<char> reach(int root, bool backward) const {
        std::vector<char> seen(boost::num_vertices(graph_), 0);
        std::vector<int> stack{root};
        seen[root] = 1;
        auto eidx = boost::get(boost::edge_index, graph_);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (auto [e, end] = boost::out_edges(v, graph_); e != end; ++e) {
                // forward: v→w usable; backward: w→v usable, which is the pair partner of v→w
                const std::size_t i = backward ? boost::get(eidx, rev_[boost::get(eidx, *e)]) : boost::get(eidx, *e);
                const int w = static_cast<int>(boost::target(*e, graph_));
                if (!seen[w] && res_[i] > Cap{}) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return seen;
    }

    /// After solve: black nodes are reachable from the source, white ones reach the sink, gray ones neither.
    boost::default_color_type color(int v) const { return color_[v]; }

private:
    Graph graph_;
    std::vector<Cap> cap_, res_;
    std::vector<Edge> rev_;
    std::vector<int> from_, to_;
    std::vector<Edge> pred_;
    std::vector<boost::default_color_type> color_;
    std::vector<long> distance_;
};

using FlowNet = BasicFlowNet<std::int64_t>;

/// Primitive lattice directions up to `radius` in the upper half plane with Cauchy–Crofton weights per unit h.
struct Stencil {
    std::vector<std::array<int, 2>> dir;
    std::vector<double> weight;
};

inline Stencil crofton_stencil(int radius) {
    Stencil st;
    for (int a = -radius; a <= radius; ++a)
        for (int b = 0; b <= radius; ++b)
            if (std::gcd(a, b) == 1 && (b > 0 || a > 0)) st.dir.push_back({a, b});
    std::sort(st.dir.begin(), st.dir.end(), [](auto& p, auto& q) { return std::atan2(p[1], p[0]) < std::atan2(q[1], q[0]); });
    const int m = static_cast<int>(st.dir.size());
    const auto ang = [&](int k) { return std::atan2(st.dir[k][1], st.dir[k][0]); };
    for (int k = 0; k < m; ++k) {
        const double prev = k > 0 ? ang(k - 1) : ang(m - 1) - std::numbers::pi;
        const double next = k + 1 < m ? ang(k + 1) : ang(0) + std::numbers::pi;
        st.weight.push_back(0.5 * (next - prev) / (2 * std::hypot(st.dir[k][0], st.dir[k][1])));
    }
    return st;
}

/// One reusable network over the interior cells for the 8-neighbour cut of every level.
class LevelCutter {
public:
    explicit LevelCutter(const GridProblem& gp) : gp_(gp), fine_(crofton_stencil(kFineRadius)) {
        const auto& g = gp.grid;
        node_.assign(g.mask.size(), -1);
        int n = 0;
        for (size_t c = 0; c < g.mask.size(); ++c)
            if (g.mask[c]) {
                node_[c] = n++;
                cells_.push_back(static_cast<int>(c));
            }
        src_ = n;
        snk_ = n + 1;
        // integer weights in units of 1e-6 h: staircase cuts tie exactly and the tie-break sees true ties
        unit_ = 1e-6 * g.hx;
        q_axis_ = std::llround(gp.w_axis / unit_);
        q_diag_ = std::llround(gp.w_diag / unit_);
        net_ = FlowNet(n + 2);
        for (int v = 0; v < n; ++v) {
            src_edge_.push_back(net_.add_pair(src_, v, 0, 0));
            snk_edge_.push_back(net_.add_pair(v, snk_, 0, 0));
        }
        std::int64_t total = 0;
        for (int v = 0; v < n; ++v) {
            const int c = cells_[v], i = c % g.nx, j = c / g.nx;
            // forward half of the neighbourhood so every pair appears once
            for (int k : {0, 1, 4, 5}) {
                const int a = i + kNbr[k][0], b = j + kNbr[k][1];
                if (!g.inside(a, b)) continue;
                const std::int64_t w = k < 4 ? q_axis_ : q_diag_;
                net_.add_pair(v, node_[g.index(a, b)], w, w);
                total += 2 * w;
            }
        }
        big_ = 16 * (total + 8 * q_axis_ * n) + 1;
    }

    /// Smallest and largest source side of the minimum cut for level t; cells flagged in `forced` stay on
    /// the source side. Ties of the 8-neighbour cut are broken by the finer Crofton measure.
    std::pair<std::vector<char>, std::vector<char>> cut(double t, const std::vector<char>* forced, double* cost) {
        const auto& g = gp_.grid;
        const int n = static_cast<int>(cells_.size());
        for (int v = 0; v < n; ++v) {
            const int c = cells_[v], i = c % g.nx, j = c / g.nx;
            std::int64_t up = 0, down = 0;
            for (int k = 0; k < 8; ++k) {
                const double gv = ghost(i + kNbr[k][0], j + kNbr[k][1]);
                if (std::isnan(gv)) continue;
                (gv >= t ? up : down) += k < 4 ? q_axis_ : q_diag_;
            }
            if (forced && (*forced)[c]) up = big_;
            net_.cap(src_edge_[v]) = up;
            net_.cap(snk_edge_[v]) = down;
        }
        const std::int64_t flow = net_.solve(src_, snk_);
        if (flow < 0 || flow >= big_)
            throw Error(ErrorKind::FlowNonConvergence, "max flow did not settle at level " + std::to_string(t));
        if (cost) *cost = static_cast<double>(flow) * unit_;
        std::vector<char> small(g.mask.size(), 0), large(g.mask.size(), 0);
        std::vector<int> free;
        for (int v = 0; v < n; ++v) {
            const auto col = net_.color(v);
            small[cells_[v]] = large[cells_[v]] = col == boost::black_color;
            if (col != boost::black_color && col != boost::white_color) free.push_back(v);
        }
        if (!free.empty()) break_ties(t, free, small, large);
        return {std::move(small), std::move(large)};
    }

private:
    double ghost(int a, int b) const {
        const auto& g = gp_.grid;
        if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) return std::numeric_limits<double>::quiet_NaN();
        return gp_.ghost[g.index(a, b)];
    }

    /// Minimum cuts of the 8-neighbour network are the closed sets of its residual graph on the free
    /// nodes. Among them this picks the cheapest under the fine stencil, as a second min cut whose
    /// infinite edges carry the closure constraints.
    void break_ties(double t, const std::vector<int>& free, std::vector<char>& small, std::vector<char>& large) {
        const auto& g = gp_.grid;
        const int m = static_cast<int>(free.size());
        std::vector<int> local(cells_.size(), -1);
        for (int k = 0; k < m; ++k) local[free[k]] = k;

        // residual edges among free nodes; a strongly connected component moves as one
        using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
        Digraph res(m);
        for (std::size_t e = 0; e < net_.edges(); ++e) {
            const int a = net_.from(e), b = net_.to(e);
            if (a >= static_cast<int>(cells_.size()) || b >= static_cast<int>(cells_.size())) continue;
            if (local[a] < 0 || local[b] < 0 || net_.residual(e) <= 0) continue;
            boost::add_edge(local[a], local[b], res);
        }
        std::vector<int> comp(m);
        const int nc = boost::strong_components(res, boost::make_iterator_property_map(comp.begin(), boost::get(boost::vertex_index, res)));

        const auto units = [&](double w) { return static_cast<std::int64_t>(std::llround(w / unit_)); };
        FlowNet sub(nc + 2);
        const int s = nc, z = nc + 1;
        std::vector<std::int64_t> up(nc, 0), down(nc, 0);
        std::int64_t total = 0;
        for (int k = 0; k < m; ++k) {
            const int c = cells_[free[k]], i = c % g.nx, j = c / g.nx;
            for (size_t d = 0; d < fine_.dir.size(); ++d) {
                const std::int64_t w = units(fine_.weight[d] * g.hx);
                for (int sg : {1, -1}) {
                    const int a = i + sg * fine_.dir[d][0], b = j + sg * fine_.dir[d][1];
                    bool src_side;
                    if (g.inside(a, b)) {
                        const int v = node_[g.index(a, b)];
                        if (local[v] >= 0) {
                            if (sg > 0 && comp[k] != comp[local[v]]) {
                                // one arc per direction, each with an empty reverse, as push-relabel expects
                                sub.add_pair(comp[k], comp[local[v]], w, 0);
                                sub.add_pair(comp[local[v]], comp[k], w, 0);
                                total += 2 * w;
                            }
                            continue;
                        }
                        src_side = net_.color(v) == boost::black_color;
                    } else {
                        const double gv = gp_.outer_at(a, b);
                        if (std::isnan(gv)) continue;
                        src_side = gv >= t;
                    }
                    (src_side ? up[comp[k]] : down[comp[k]]) += w;
                }
            }
        }
        const std::int64_t inf = 16 * (total + std::accumulate(up.begin(), up.end(), std::int64_t{0}) +
                                       std::accumulate(down.begin(), down.end(), std::int64_t{0})) + 1;
        for (int k = 0; k < nc; ++k) sub.add_pair(s, k, up[k], 0), sub.add_pair(k, z, down[k], 0);
        for (auto [e, end] = boost::edges(res); e != end; ++e) {
            const int a = comp[boost::source(*e, res)], b = comp[boost::target(*e, res)];
            if (a != b) sub.add_pair(a, b, inf, 0);  // a on the source side forces b
        }
        sub.solve_push_relabel(s, z);
        const auto from_s = sub.reach(s, false), to_z = sub.reach(z, true);
        for (int k = 0; k < m; ++k) {
            const int c = cells_[free[k]];
            small[c] = from_s[comp[k]];
            large[c] = !to_z[comp[k]];
        }
    }

    const GridProblem& gp_;
    Stencil fine_;
    FlowNet net_;
    std::vector<int> node_, cells_;
    std::vector<std::size_t> src_edge_, snk_edge_;
    int src_ = 0, snk_ = 0;
    double unit_ = 0;
    std::int64_t q_axis_ = 0, q_diag_ = 0, big_ = 0;
};

}  // namespace detail

/// Layer cake u_h = min f + Δt · #{k : x ∈ E_k} over midpoint levels t_k = min f + (k − ½)Δt.
inline OracleSolution oracle_solve(const ConvexDomain& dom, const BoundaryFunction& f, const OracleOptions& opt = {}) {
    if (opt.levels < 2) throw Error(ErrorKind::BadInput, "oracle needs at least 2 levels");
    const GridProblem gp = make_grid_problem(dom, f, opt.h);
    OracleSolution out;
    out.u = gp.grid;
    const auto& g = gp.grid;
    const auto finish = [&] {
        out.lower = out.upper = out.u;
        for (size_t c = 0; c < g.mask.size(); ++c)
            if (g.mask[c]) out.u.u[c] = 0.5 * (out.lower.u[c] + out.upper.u[c]);
    };
    const int N = opt.levels;
    const double range = gp.f_max - gp.f_min;
    for (size_t c = 0; c < g.mask.size(); ++c)
        if (g.mask[c]) out.u.u[c] = gp.f_min;
    if (range <= 0) {
        finish();
        return out;
    }
    const double dt = range / N;
    for (int k = 1; k <= N; ++k) out.levels.push_back(gp.f_min + (k - 0.5) * dt);
    out.level_sets.assign(N, {});
    out.level_sets_upper.assign(N, {});
    out.cut_cost.assign(N, 0.0);

    if (opt.nesting == NestingMode::Sequential) {
        detail::LevelCutter cutter(gp);
        for (int k = N - 1; k >= 0; --k)
            std::tie(out.level_sets[k], out.level_sets_upper[k]) =
                cutter.cut(out.levels[k], k + 1 < N ? &out.level_sets[k + 1] : nullptr, &out.cut_cost[k]);
    } else {
        const int workers = std::min(thread_count(), N);
        std::vector<std::optional<detail::LevelCutter>> pool(workers);
        parallel_for(workers, [&](int w) {
            pool[w].emplace(gp);
            for (int k = w; k < N; k += workers)
                std::tie(out.level_sets[k], out.level_sets_upper[k]) = pool[w]->cut(out.levels[k], nullptr, &out.cut_cost[k]);
        });
        // cumulative union from the top restores nesting
        for (int k = N - 2; k >= 0; --k)
            for (size_t c = 0; c < g.mask.size(); ++c) {
                out.level_sets[k][c] |= out.level_sets[k + 1][c];
                out.level_sets_upper[k][c] |= out.level_sets_upper[k + 1][c];
            }
    }
    finish();
    for (int k = 0; k < N; ++k)
        for (size_t c = 0; c < g.mask.size(); ++c) {
            if (out.level_sets[k][c]) out.lower.u[c] += dt;
            if (out.level_sets_upper[k][c]) out.upper.u[c] += dt;
        }
    for (size_t c = 0; c < g.mask.size(); ++c)
        if (g.mask[c]) out.u.u[c] = 0.5 * (out.lower.u[c] + out.upper.u[c]);
    return out;
}

/// Samples any pointwise solution on the cells of `like`.
inline GridFunction sample_on(const GridFunction& like, const std::function<double(const Point&)>& u) {
    GridFunction out = like;
    std::vector<int> cells;
    for (size_t c = 0; c < like.mask.size(); ++c)
        if (like.mask[c]) cells.push_back(static_cast<int>(c));
    parallel_for(static_cast<int>(cells.size()), [&](int k) {
        const int c = cells[k];
        out.u[c] = u(like.center(c % like.nx, c / like.nx));
    });
    return out;
}

/// Isotropic forward-difference total variation; a missing neighbour drops that difference.
inline double grid_total_variation(const GridFunction& g) {
    double tv = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside(i, j)) continue;
            const double c = g.u[g.index(i, j)];
            const double dx = g.inside(i + 1, j) ? (g.u[g.index(i + 1, j)] - c) / g.hx : 0.0;
            const double dy = g.inside(i, j + 1) ? (g.u[g.index(i, j + 1)] - c) / g.hy : 0.0;
            tv += g.hx * g.hy * std::hypot(dx, dy);
        }
    return tv;
}

/// Mean |u − f| over cells that touch a cell outside Ω, f taken at the nearest boundary point.
inline double grid_trace_error(const GridFunction& g, const ConvexDomain& dom, const BoundaryFunction& f) {
    const double scale = f.period() / dom.perimeter();
    double sum = 0;
    int count = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside(i, j)) continue;
            bool rim = false;
            for (const auto& d : detail::kNbr) rim = rim || !g.inside(i + d[0], j + d[1]);
            if (!rim) continue;
            sum += std::abs(g.u[g.index(i, j)] - f(dom.arclength_of(g.center(i, j)) * scale));
            ++count;
        }
    return count ? sum / count : 0.0;
}

struct ComparisonReport {
    int cells = 0;
    double l1 = 0;    // mean |a − b| over cells, i.e. the L¹ distance divided by the covered area
    double linf = 0;
    double tv_a = 0, tv_b = 0;
    std::optional<double> trace_a, trace_b;
};

/// Distances between two grid functions on the same cells.
inline ComparisonReport compare(const GridFunction& a, const GridFunction& b, const ConvexDomain* dom = nullptr,
                                const BoundaryFunction* f = nullptr) {
    const double tol = 1e-9 * std::max({a.hx, a.hy, b.hx, b.hy});
    if (a.nx != b.nx || a.ny != b.ny || std::abs(a.hx - b.hx) > tol || std::abs(a.hy - b.hy) > tol || std::abs(a.x0 - b.x0) > tol ||
        std::abs(a.y0 - b.y0) > tol || a.mask != b.mask)
        throw Error(ErrorKind::GridMismatch, "grids differ in origin, spacing, size or mask");
    ComparisonReport r;
    for (size_t c = 0; c < a.mask.size(); ++c) {
        if (!a.mask[c]) continue;
        const double d = std::abs(a.u[c] - b.u[c]);
        r.l1 += d;
        r.linf = std::max(r.linf, d);
        ++r.cells;
    }
    if (r.cells) r.l1 /= r.cells;
    r.tv_a = grid_total_variation(a);
    r.tv_b = grid_total_variation(b);
    if (dom && f) {
        r.trace_a = grid_trace_error(a, *dom, *f);
        r.trace_b = grid_trace_error(b, *dom, *f);
    }
    return r;
}

}  // namespace lgk
