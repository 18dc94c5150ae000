#include "dualbound/cli.hpp"
#include "dualbound/parallel.hpp"
#include "dualbound/primal.hpp"

#include <iostream>

namespace dualbound::cli {

using nlohmann::json;

namespace {

struct Setup {
    BenchmarkProblem bench;
    Vec x;
    TimeGrid grid;
    SpatialBox box;
    PathwiseDPConfig dp;
};

Vec to_vec(const std::vector<double>& v, std::string_view what) {
    if (v.size() > kMaxDim) throw Error(ErrorCode::InvalidConfig, std::string(what) + " has too many components");
    return Vec(v.begin(), v.end());
}

template <class T>
std::vector<T> per_axis(const std::vector<T>& v, std::size_t dim, std::string_view key) {
    if (v.size() == dim) return v;
    if (v.size() == 1) return std::vector<T>(dim, v.front());
    throw Error(ErrorCode::InvalidConfig, "config key '" + std::string(key) + "' has the wrong number of entries");
}

Setup prepare(const RunConfig& cfg) {
    Setup s{make_benchmark(cfg.problem), {}, {}, {}, {}};
    const ControlProblem& p = s.bench.problem;
    s.x = cfg.x.empty() ? s.bench.x0 : to_vec(cfg.x, "x");
    if (s.x.size() != p.state_dim) throw Error(ErrorCode::InvalidConfig, "config key 'x' has the wrong dimension");
    if (!(cfg.t >= p.t0 && cfg.t < p.T)) throw Error(ErrorCode::InvalidConfig, "config key 't' must lie in [t0, T)");
    s.grid = TimeGrid{cfg.t, p.T, cfg.n_steps};

    s.box = s.bench.dual_box;
    if (!cfg.box_lower.empty()) s.box.lower = to_vec(per_axis(cfg.box_lower, p.state_dim, "box.lower"), "box.lower");
    if (!cfg.box_upper.empty()) s.box.upper = to_vec(per_axis(cfg.box_upper, p.state_dim, "box.upper"), "box.upper");
    if (!cfg.box_points.empty()) s.box.points = per_axis(cfg.box_points, p.state_dim, "box.points");
    if (cfg.box_refine) s.box.refinement_levels = *cfg.box_refine;
    try {
        s.box.check(p.state_dim);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("spatial box: ") + e.what());
    }

    s.dp.lower = s.box.lower;
    s.dp.upper = s.box.upper;
    s.dp.state_points = per_axis(cfg.dp_state_points, p.state_dim, "dp.state_points");
    s.dp.control_points = per_axis(cfg.dp_control_points, p.control_dim(), "dp.control_points");
    return s;
}

TestFunction make_h(const RunConfig& cfg, const BenchmarkProblem& bench) {
    TestFunction h = [&] {
        if (cfg.h == "oracle") {
            if (!bench.oracle) throw Error(ErrorCode::InvalidConfig, "problem has no oracle test function");
            return *bench.oracle;
        }
        const ParametricFamily fam = make_family(cfg.h, bench);
        const std::vector<double> theta = cfg.h_params.empty() ? fam.initial : cfg.h_params;
        if (theta.size() != fam.dim)
            throw Error(ErrorCode::InvalidConfig, "config key 'h.params' needs " + std::to_string(fam.dim) + " values");
        return fam.build(theta);
    }();
    return cfg.h_shift == 0.0 ? h : h.shifted(cfg.h_shift);
}

Policy make_policy(const RunConfig& cfg, const BenchmarkProblem& bench) {
    if (cfg.policy == "oracle") {
        if (!bench.oracle_policy) throw Error(ErrorCode::InvalidConfig, "problem has no oracle policy");
        return *bench.oracle_policy;
    }
    const Vec u = to_vec(per_axis(cfg.policy_value, bench.problem.control_dim(), "policy.value"), "policy.value");
    return Policy::constant(bench.problem.controls, u);
}

ConvergenceRow row_for(const TimeGrid& g) {
    ConvergenceRow r;
    r.n_steps = g.steps;
    r.dt = g.dt();
    return r;
}

struct Outcome {
    json results;
    std::string series;
    bool failed = false;
};

Outcome run_primal(const RunConfig& cfg, const Setup& s) {
    const BoundEstimate e = primal_bound(s.bench.problem, make_policy(cfg, s.bench), s.x, cfg.n_paths, s.grid, cfg.seed);
    ConvergenceRow r = row_for(s.grid);
    r.primal = e.value;
    r.primal_se = e.std_error;
    return {{{"primal", to_json(e)}}, convergence_csv({r})};
}

Outcome run_dual1(const RunConfig& cfg, const Setup& s) {
    const BoundEstimate e = dual_v1(s.bench.problem, make_h(cfg, s.bench), s.x, cfg.n_paths, s.grid, s.dp, cfg.seed);
    ConvergenceRow r = row_for(s.grid);
    r.dual1 = e.value;
    r.dual1_se = e.std_error;
    return {{{"dual_v1", to_json(e)}}, convergence_csv({r})};
}

Outcome run_dual2(const RunConfig& cfg, const Setup& s) {
    const BoundEstimate e = dual_v2(s.bench.problem, make_h(cfg, s.bench), s.x, s.box, s.grid);
    ConvergenceRow r = row_for(s.grid);
    r.dual2 = e.value;
    return {{{"dual_v2", to_json(e)}}, convergence_csv({r})};
}

Outcome run_search(const RunConfig& cfg, const Setup& s) {
    ParametricFamily fam = make_family(cfg.search_family, s.bench);
    if (!cfg.search_initial.empty()) fam.initial = cfg.search_initial;
    if (!cfg.search_scale.empty()) fam.scale = cfg.search_scale;
    if (fam.initial.size() != fam.dim || fam.scale.size() != fam.dim)
        throw Error(ErrorCode::InvalidConfig, "search.initial / search.scale need " + std::to_string(fam.dim) + " values");

    SearchConfig sc;
    sc.objective = cfg.search_objective == "dual_v1" ? Objective::dual_v1 : Objective::dual_v2;
    sc.x = s.x;
    sc.grid = s.grid;
    sc.box = s.box;
    sc.dp = s.dp;
    sc.n_paths = cfg.n_paths;
    sc.seed = cfg.seed;
    sc.budget = cfg.search_budget;
    const SearchTrace trace = minimize_dual(s.bench.problem, fam, sc);
    json results = {{"trace", to_json(trace)}, {"best_so_far", best_so_far(trace)}};
    if (s.bench.oracle) results["oracle_value"] = s.bench.oracle->value(s.grid.start, s.x);
    return {results, trace_csv(trace)};
}

Outcome run_hjb(const RunConfig& cfg, const Setup& s) {
    const ControlProblem& p = s.bench.problem;
    const TestFunction h = make_h(cfg, s.bench);
    const double tau = cfg.hjb_tau.value_or(s.bench.oracle_tolerance);
    SpatialBox box = s.bench.residual_box;
    if (!cfg.box_lower.empty() || !cfg.box_upper.empty() || !cfg.box_points.empty()) box = s.box;
    const std::vector<double> times = interior_times(cfg.t, p.T, cfg.hjb_time_points);
    const HJBReport report = hjb_residual(p, h, times, box, tau);

    std::string series = "t,residual_min,residual_max,residual_mean\n";
    for (double t : times) {
        const double one[] = {t};
        const HJBReport slice = hjb_residual(p, h, one, box, tau);
        series += format_double(t) + ',' + format_double(slice.residual.min) + ',' +
                  format_double(slice.residual.max) + ',' + format_double(slice.residual.mean) + '\n';
    }
    return {{{"hjb", to_json(report)}, {"test_function", h.id}}, series};
}

Outcome run_bench(const RunConfig& cfg, const Setup& s) {
    const ControlProblem& p = s.bench.problem;
    const TestFunction h = make_h(cfg, s.bench);
    const Policy policy = make_policy(cfg, s.bench);
    Outcome out;
    out.results["levels"] = json::array();
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : cfg.bench_n_steps) {
        const TimeGrid grid{cfg.t, p.T, n};
        const BoundEstimate primal = primal_bound(p, policy, s.x, cfg.n_paths, grid, cfg.seed);
        const BoundEstimate v1 = dual_v1(p, h, s.x, cfg.n_paths, grid, s.dp, cfg.seed);
        const BoundEstimate v2 = dual_v2(p, h, s.x, s.box, grid);
        const SandwichReport sw =
            sandwich_check(primal, v1, v2, discretization_allowance(grid.dt(), v2.value, cfg.bench_allowance));
        out.failed = out.failed || sw.failed;
        out.results["levels"].push_back({{"n_steps", n}, {"sandwich", to_json(sw)}});
        ConvergenceRow r = row_for(grid);
        r.primal = primal.value;
        r.primal_se = primal.std_error;
        r.dual1 = v1.value;
        r.dual1_se = v1.std_error;
        r.dual2 = v2.value;
        r.gap = v1.value - primal.value;
        rows.push_back(r);
    }
    if (s.bench.oracle) out.results["oracle_value"] = s.bench.oracle->value(cfg.t, s.x);
    out.results["provenance"] = s.bench.provenance;
    out.series = convergence_csv(rows);
    return out;
}

Outcome run_degeneracy(const RunConfig& cfg, const Setup& s) {
    const DegeneracyReport d = degeneracy_diagnostic(s.bench.problem, make_h(cfg, s.bench), s.x, cfg.n_paths, s.grid,
                                                     s.dp, s.box, cfg.seed, cfg.degeneracy_tol);
    std::string series = "path,pathwise,gap\n";
    for (std::size_t i = 0; i < d.gap.size(); ++i)
        series += std::to_string(i) + ',' + format_double(d.pathwise[i]) + ',' + format_double(d.gap[i]) + '\n';
    return {{{"degeneracy", to_json(d)}}, series};
}

json envelope(Subcommand sub, const json& config) {
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"subcommand", subcommand_name(sub)},
            {"workers", worker_count()},
            {"config", config},
            {"status", "ok"},
            {"error", nullptr}};
}

int write_error(const std::filesystem::path& dir, json report, const Error& e) {
    report["status"] = "error";
    report["error"] = {{"code", code_name(e.code())}, {"message", e.what()}};
    std::cerr << "error [" << code_name(e.code()) << "]: " << e.what() << '\n';
    try {
        std::filesystem::create_directories(dir);
        write_text(dir / "report.json", report.dump(2) + "\n");
    } catch (const std::exception& io) {
        std::cerr << "error: could not write report: " << io.what() << '\n';
    }
    return kExitError;
}

}  // namespace

int run(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.output);
    json report = envelope(cfg.subcommand, config_to_json(cfg));
    Outcome out;
    try {
        const Setup s = prepare(cfg);
        report["problem"] = {{"id", s.bench.problem.id}, {"provenance", s.bench.provenance}};
        switch (cfg.subcommand) {
            case Subcommand::primal: out = run_primal(cfg, s); break;
            case Subcommand::dual1: out = run_dual1(cfg, s); break;
            case Subcommand::dual2: out = run_dual2(cfg, s); break;
            case Subcommand::search: out = run_search(cfg, s); break;
            case Subcommand::hjb_check: out = run_hjb(cfg, s); break;
            case Subcommand::bench: out = run_bench(cfg, s); break;
            case Subcommand::diagnose_degeneracy: out = run_degeneracy(cfg, s); break;
        }
        report["results"] = out.results;
        if (out.failed) report["status"] = "FAILED";
        std::filesystem::create_directories(dir);
        write_text(dir / "series.csv", out.series);
        write_text(dir / "report.json", report.dump(2) + "\n");
    } catch (const Error& e) {
        return write_error(dir, report, e);
    } catch (const std::filesystem::filesystem_error& e) {
        return write_error(dir, report, Error(ErrorCode::IoError, e.what()));
    }
    if (out.failed) {
        std::cerr << "FAILED: weak-duality sandwich violated beyond 3 standard errors plus allowance\n";
        return kExitFailed;
    }
    return kExitOk;
}

int run_file(Subcommand subcommand, const std::filesystem::path& config_path) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path, subcommand);
    } catch (const Error& e) {
        // Best effort: report next to the config when no output dir is known.
        json report = envelope(subcommand, nullptr);
        return write_error(config_path.parent_path().empty() ? "." : config_path.parent_path(), report, e);
    }
    return run(cfg);
}

}  // namespace dualbound::cli
