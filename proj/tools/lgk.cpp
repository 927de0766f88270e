// lgk: command-line front end for the least gradient toolkit.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lgk/admissibility.hpp"
#include "lgk/approximation.hpp"
#include "lgk/fixtures.hpp"
#include "lgk/hump_assembly.hpp"
#include "lgk/io.hpp"
#include "lgk/oracle.hpp"
#include "lgk/solver.hpp"

namespace fs = std::filesystem;
using namespace lgk;
using io::json;

namespace {

struct Common {
    std::string domain, data, out = ".";
    unsigned seed = 1;
};

struct GridSpec {
    int rows = 51, cols = 101;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char x = 0;
    std::istringstream in(s);
    if (!(in >> g.rows >> x >> g.cols) || (x != 'x' && x != 'X') || !in.eof() || g.rows < 2 || g.cols < 2)
        throw Error(ErrorKind::BadInput, "grid must look like HxW with H, W >= 2");
    return g;
}

json base_report(const std::string& command) { return {{"schema", io::kSchema}, {"command", command}}; }

void emit(const fs::path& dir, const std::string& name, const std::string& bytes) {
    fs::create_directories(dir);
    io::write_atomic(dir / name, bytes);
}

/// Report goes to stdout and to <out>/report.json.
void finish(json& report, const fs::path& dir, int code) {
    report["exit_code"] = code;
    const auto text = io::dump(report);
    std::cout << text;
    try {
        emit(dir, "report.json", text);
    } catch (const Error& e) {
        std::cerr << "lgk: " << e.what() << "\n";
    }
}

GridFunction evaluation_grid(const ConvexDomain& dom, const BoundaryFunction& f, const std::string& grid, double h) {
    if (h > 0) return make_grid_problem(dom, f, h).grid;
    const auto g = parse_grid(grid);
    return io::lattice_over(dom, g.rows, g.cols);
}

json grid_json(const GridFunction& g) {
    return {{"nx", g.nx}, {"ny", g.ny}, {"hx", g.hx}, {"hy", g.hy}, {"cells", g.count()}};
}

/// Seeded pairs of grid cells against ω_f(r/A + √r/B), with 1% slack.
json modulus_check(const GridFunction& g, const BoundaryFunction& f, const ConvexDomain& dom, const ModulusConstants& mc,
                   unsigned seed, int pairs = 200) {
    std::vector<int> cells;
    for (size_t c = 0; c < g.mask.size(); ++c)
        if (g.mask[c]) cells.push_back(static_cast<int>(c));
    EuclideanModulus omega(f, dom);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
    int violations = 0;
    double worst = 0;
    for (int k = 0; k < pairs && cells.size() > 1; ++k) {
        const int a = cells[pick(rng)], b = cells[pick(rng)];
        const Point pa = g.center(a % g.nx, a / g.nx), pb = g.center(b % g.nx, b / g.nx);
        const double r = dist(pa, pb);
        const double bound = omega(r / mc.A + std::sqrt(r) / mc.B);
        const double lhs = std::abs(g.u[a] - g.u[b]);
        worst = std::max(worst, lhs - bound);
        if (lhs > 1.01 * bound + 1e-12) ++violations;
    }
    return {{"A", mc.A}, {"B", mc.B}, {"pairs", pairs}, {"violations", violations}, {"worst_excess", worst}};
}

struct SolveArgs {
    int levels = 256;
    std::vector<int> n_seq{4, 8, 16, 32};
    std::string grid = "51x101";
    double h = 0;
    bool allow_boundary = false;
};

/// Solves (continuous or sandwich), writes solution.csv and levels.svg, fills the report.
void run_solve(const ConvexDomain& dom, const BoundaryFunction& f, const SolveArgs& a, const Common& c, json& report,
               GridFunction* values = nullptr) {
    GridFunction g = evaluation_grid(dom, f, a.grid, a.h);
    auto scene = io::scene_for(dom, f);
    if (f.continuous()) {
        ContinuousOptions opt;
        opt.levels = a.levels;
        opt.n_seq = a.n_seq;
        opt.allow_boundary_case = a.allow_boundary;
        ContinuousReport rep;
        auto u = solve_continuous(dom, f, opt, &rep);
        g = sample_on(g, [&](const Point& p) { return u(p); });
        io::add_solution(scene, u);
        report["solver"] = "continuous";
        report["admissibility"] = io::to_json(rep.admissibility, dom);
        report["n_used"] = rep.n_used;
        report["sup_change"] = rep.sup_change;
        report["converged"] = rep.converged;
        report["delta_conv"] = rep.delta_conv;
        report["tv"] = u.tv_coarea();
        report["modulus"] = modulus_check(g, f, dom, {u.A, u.B}, c.seed);
    } else {
        SandwichOptions opt;
        opt.levels = a.levels;
        opt.allow_boundary_case = a.allow_boundary;
        auto sw = solve_discontinuous(dom, f, opt);
        g = sample_on(g, [&](const Point& p) { return sw.u(p); });
        io::add_solution(scene, sw.u);
        report["solver"] = "sandwich";
        report["admissibility"] = io::to_json(sw.report.admissibility, dom);
        report["n_used"] = sw.report.n_used;
        report["max_comparison_violation"] = sw.report.max_comparison_violation;
        report["max_gap"] = sw.report.max_gap;
        report["probe_trace_error"] = sw.report.trace_error;
        report["probe_trace_samples"] = sw.report.trace.size();
        report["tv"] = sw.u.tv_coarea();
    }
    report["grid"] = grid_json(g);
    report["trace_error"] = grid_trace_error(g, dom, f);
    emit(c.out, "solution.csv", io::to_csv(g));
    emit(c.out, "levels.svg", io::to_svg(scene));
    if (values) *values = std::move(g);
}

double sup_error(const GridFunction& g, const std::function<double(const Point&)>& exact) {
    double e = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.inside(i, j)) e = std::max(e, std::abs(g.u[g.index(i, j)] - exact(g.center(i, j))));
    return e;
}

int check_only(const ConvexDomain& dom, const BoundaryFunction& f, json& report) {
    const auto r = check_admissibility(f, dom);
    report["verdict"] = to_string(r.global);
    report["admissibility"] = io::to_json(r, dom);
    if (r.global == Verdict::Fail) {
        std::cerr << "lgk: data is not admissible\n";
        return 3;
    }
    return 0;
}

struct ExampleArgs {
    std::string name;
    double L = 2, lambda = -1, mu = -1;
    int K = 6;
};

int run_example(const ExampleArgs& e, const SolveArgs& a, const Common& c, json& report) {
    report["example"] = e.name;
    const fixtures::RectangleExample rect{e.L, 1};
    if (e.name.rfind("co1", 0) == 0) {
        const double lam = e.lambda >= 0 ? e.lambda : e.name == "co1a" ? 0.5 : e.name == "co1b" ? 1.5 : 1.0;
        if (e.name != "co1a" && e.name != "co1b" && e.name != "co1c")
            throw Error(ErrorKind::BadInput, "unknown example " + e.name);
        report["L"] = e.L;
        report["lambda"] = lam;
        auto dom = rect.domain();
        auto f = fixtures::co1_data(dom, e.L, lam);
        emit(c.out, "problem.json", io::dump(io::to_json(io::Problem{dom, f})));
        const int code = check_only(dom, f, report);
        if (code) return code;
        auto exact = [&](const Point& p) { return fixtures::co1_solution(p, e.L, lam); };
        if (check_admissibility(f, dom).global == Verdict::BoundaryCase) {
            // approach from inside the admissible family
            std::vector<double> lams;
            for (int j = 1; j <= 3; ++j) lams.push_back(lam * (1 - std::pow(10.0, -j)));
            ContinuousOptions opt;
            opt.levels = a.levels;
            opt.n_seq = a.n_seq;
            auto lim = solve_as_limit(dom, [&](double l) { return fixtures::co1_data(dom, e.L, l); }, lams, opt);
            auto g = sample_on(evaluation_grid(dom, f, a.grid, a.h), [&](const Point& p) { return lim.u(p); });
            auto scene = io::scene_for(dom, f);
            io::add_solution(scene, lim.u);
            report["solver"] = "limit";
            report["params"] = lim.params;
            report["sup_change"] = lim.sup_change;
            report["grid"] = grid_json(g);
            report["closed_form_sup_error"] = sup_error(g, exact);
            emit(c.out, "solution.csv", io::to_csv(g));
            emit(c.out, "levels.svg", io::to_svg(scene));
            return 0;
        }
        GridFunction g;
        run_solve(dom, f, a, c, report, &g);
        report["closed_form_sup_error"] = sup_error(g, exact);
        return 0;
    }
    if (e.name.rfind("co2", 0) == 0) {
        const double mu = e.mu >= 0 ? e.mu : e.name == "co2a" ? 5.0 : e.name == "co2b" ? 2 * e.L : 3.0;
        if (e.name != "co2a" && e.name != "co2b" && e.name != "co2c")
            throw Error(ErrorKind::BadInput, "unknown example " + e.name);
        report["L"] = e.L;
        report["mu"] = mu;
        auto dom = rect.domain();
        auto f = fixtures::co2_data(dom, e.L, mu);
        emit(c.out, "problem.json", io::dump(io::to_json(io::Problem{dom, f})));
        const int code = check_only(dom, f, report);
        if (code) return code;
        GridFunction g;
        run_solve(dom, f, a, c, report, &g);
        if (std::abs(mu - 2 * e.L) < 1e-12) {
            double l1 = 0;
            for (size_t k = 0; k < g.mask.size(); ++k)
                if (g.mask[k]) l1 += std::abs(g.u[k] - fixtures::co2_fan_solution(g.center(k % g.nx, k / g.nx), e.L));
            report["closed_form_mean_error"] = l1 / std::max(1, g.count());
        }
        return 0;
    }
    if (e.name == "humps") {
        fixtures::InfiniteHumpExample ex;
        ex.K = e.K;
        auto dom = ex.domain();
        auto f = ex.data(dom);
        emit(c.out, "problem.json", io::dump(io::to_json(io::Problem{dom, f})));
        report["K"] = e.K;
        report["alpha"] = ex.alpha;
        const auto adm = check_admissibility(f, dom);
        report["admissibility"] = io::to_json(adm, dom);
        auto as = solve_infinite_humps(dom, f, e.K);
        auto g = sample_on(evaluation_grid(dom, f, a.grid, a.h), [&](const Point& p) { return as(p); });
        auto scene = io::scene_for(dom, f);
        for (size_t k = 0; k < as.pieces.size(); ++k) {
            const auto& pc = as.pieces[k];
            io::add_solution(scene, as.solutions[k], 32, [&](const Point& q) { return pc.center + pc.scale * q; });
        }
        report["solver"] = "hump-assembly";
        report["apex"] = {as.apex.x, as.apex.y};
        report["values"] = as.values;
        report["cut_mismatch"] = as.cut_mismatch;
        report["max_cut_mismatch"] = as.max_cut_mismatch;
        report["grid"] = grid_json(g);
        emit(c.out, "solution.csv", io::to_csv(g));
        emit(c.out, "levels.svg", io::to_svg(scene));
        return 0;
    }
    throw Error(ErrorKind::BadInput, "unknown example " + e.name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lgk: least gradient solver, admissibility checker and grid oracle"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    Common c;
    SolveArgs sa;
    auto add_io = [&](CLI::App* s, bool data) {
        s->add_option("--domain", c.domain, "domain JSON, or a problem JSON with domain and data")->required();
        if (data) s->add_option("--data", c.data, "boundary data JSON");
        s->add_option("--out", c.out, "output directory")->capture_default_str();
    };
    auto add_solve = [&](CLI::App* s) {
        s->add_option("--levels", sa.levels, "level count")->capture_default_str()->check(CLI::Range(2, 1 << 20));
        s->add_option("--n-seq", sa.n_seq, "approximation sequence")->delimiter(',')->capture_default_str();
        s->add_option("--grid", sa.grid, "output lattice HxW over the bounding box")->capture_default_str();
        s->add_option("--h", sa.h, "use the oracle cell lattice with this size instead of --grid");
        s->add_flag("--allow-boundary-case", sa.allow_boundary, "solve when a hump sits exactly on the #2 boundary");
        s->add_option("--seed", c.seed, "seed for the sampled modulus check")->capture_default_str();
    };

    auto* check = app.add_subcommand("check", "admissibility report");
    add_io(check, true);

    int approx_n = 8;
    auto* approx = app.add_subcommand("approx", "strictly convex outer approximation with lifted data");
    add_io(approx, true);
    approx->add_option("--n", approx_n, "approximation index")->required()->check(CLI::PositiveNumber);

    auto* solve = app.add_subcommand("solve", "solve and write solution.csv, levels.svg, report.json");
    add_io(solve, true);
    add_solve(solve);

    OracleOptions oo;
    std::string nesting = "sequential";
    auto* oracle = app.add_subcommand("oracle", "grid min-cut solution");
    add_io(oracle, true);
    oracle->add_option("--h", oo.h, "cell size")->capture_default_str();
    oracle->add_option("--levels", oo.levels, "level count")->capture_default_str();
    oracle->add_option("--nesting", nesting, "sequential or relaxed")->check(CLI::IsMember({"sequential", "relaxed"}))->capture_default_str();

    std::string csv_a, csv_b;
    auto* cmp = app.add_subcommand("compare", "distances between two solution grids");
    cmp->add_option("a", csv_a, "first CSV")->required();
    cmp->add_option("b", csv_b, "second CSV")->required();
    cmp->add_option("--domain", c.domain, "domain or problem JSON for trace errors");
    cmp->add_option("--data", c.data, "boundary data JSON for trace errors");
    cmp->add_option("--out", c.out, "output directory")->capture_default_str();

    ExampleArgs ex;
    auto* example = app.add_subcommand("example", "bundled fixtures: co1a co1b co1c co2a co2b co2c humps");
    example->add_option("name", ex.name, "fixture name")->required();
    example->add_option("--L", ex.L, "half width of the rectangle")->capture_default_str();
    example->add_option("--lambda", ex.lambda, "co1 plateau parameter");
    example->add_option("--mu", ex.mu, "co2 right-edge value");
    example->add_option("--K", ex.K, "hump truncation")->capture_default_str();
    example->add_option("--out", c.out, "output directory")->capture_default_str();
    add_solve(example);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        json report = base_report(argc > 1 ? argv[1] : "");
        report["status"] = "error";
        report["error"] = {{"kind", "BadInput"}, {"message", e.what()}};
        report["exit_code"] = 2;
        std::cout << io::dump(report);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    json report = base_report(command);
    int code = 0;
    try {
        if (command == "compare") {
            auto a = io::grid_from_csv(io::read_file(csv_a), csv_a);
            auto b = io::grid_from_csv(io::read_file(csv_b), csv_b);
            std::optional<io::Problem> p;
            if (!c.domain.empty()) p = io::load_problem(c.domain, c.data);
            const auto r = p ? compare(a, b, &p->domain, &p->data) : compare(a, b);
            report["cells"] = r.cells;
            report["l1"] = r.l1;
            report["linf"] = r.linf;
            report["tv_a"] = r.tv_a;
            report["tv_b"] = r.tv_b;
            report["trace_a"] = r.trace_a ? json(*r.trace_a) : json(nullptr);
            report["trace_b"] = r.trace_b ? json(*r.trace_b) : json(nullptr);
        } else if (command == "example") {
            code = run_example(ex, sa, c, report);
        } else {
            auto p = io::load_problem(c.domain, c.data);
            if (command == "check") {
                code = check_only(p.domain, p.data, report);
            } else if (command == "approx") {
                auto ap = build_strictly_convex(p.domain, approx_n);
                auto doc = io::to_json(io::Problem{ap.domain, lift_data(p.data, ap)});
                json prov = json::array();
                for (const auto& s : ap.provenance)
                    prov.push_back({{"flat_part", s.flat_part}, {"surgery", to_string(s.kind)}, {"sagitta", s.sagitta}});
                doc["approximation"] = {{"n", ap.n}, {"provenance", prov}, {"source_s", ap.source_s}};
                emit(c.out, "approx.json", io::dump(doc));
                report["n"] = ap.n;
                report["vertices"] = ap.domain.size();
                report["provenance"] = prov;
            } else if (command == "solve") {
                run_solve(p.domain, p.data, sa, c, report);
            } else if (command == "oracle") {
                oo.nesting = nesting == "relaxed" ? NestingMode::Relaxed : NestingMode::Sequential;
                auto sol = oracle_solve(p.domain, p.data, oo);
                double cost = 0;
                for (size_t k = 0; k < sol.cut_cost.size(); ++k) cost += sol.cut_cost[k];
                report["h"] = oo.h;
                report["levels"] = sol.levels.size();
                report["nesting"] = nesting;
                report["grid"] = grid_json(sol.u);
                report["tv"] = grid_total_variation(sol.u);
                report["cut_cost_total"] = sol.levels.empty() ? 0.0 : cost * (p.data.range() / sol.levels.size());
                report["trace_error"] = grid_trace_error(sol.u, p.domain, p.data);
                emit(c.out, "oracle.csv", io::to_csv(sol.u));
            }
        }
        report["status"] = code == 0 ? "ok" : "not-admissible";
    } catch (const Error& e) {
        code = exit_code(e.kind());
        report["status"] = "error";
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        std::cerr << "lgk: " << e.what() << "\n";
    } catch (const std::exception& e) {
        code = 2;
        report["status"] = "error";
        report["error"] = {{"kind", "BadInput"}, {"message", e.what()}};
        std::cerr << "lgk: " << e.what() << "\n";
    }
    finish(report, c.out, code);
    return code;
}
