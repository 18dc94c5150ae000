#include "dualbound/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace dualbound {

std::string_view objective_name(Objective o) { return o == Objective::dual_v1 ? "dual_v1" : "dual_v2"; }

std::vector<double> best_so_far(const SearchTrace& trace) {
    std::vector<double> out;
    out.reserve(trace.evaluations.size());
    double best = std::numeric_limits<double>::infinity();
    for (const SearchEvaluation& e : trace.evaluations) {
        best = std::min(best, e.objective);
        out.push_back(best);
    }
    return out;
}

namespace {

// 3 interior times x 3 points per axis inside the central 80% of the box.
std::vector<TimeState> check_points(const ControlProblem& problem, const SearchConfig& cfg) {
    Vec lo = cfg.box.lower, hi = cfg.box.upper;
    for (std::size_t a = 0; a < lo.size(); ++a) {
        const double w = hi[a] - lo[a];
        lo[a] += 0.1 * w;
        hi[a] -= 0.1 * w;
    }
    const std::vector<Vec> xs = tensor_grid(lo, hi, std::vector<std::size_t>(lo.size(), 3));
    const double t0 = std::max(problem.t0, cfg.grid.start);
    std::vector<TimeState> pts;
    for (std::size_t i = 1; i <= 3; ++i) {
        const double t = t0 + (problem.T - t0) * static_cast<double>(i) / 4.0;
        for (const Vec& x : xs) pts.push_back({t, x});
    }
    return pts;
}

}  // namespace

SearchEvaluation evaluate_candidate(const ControlProblem& problem, const ParametricFamily& family,
                                    std::span<const double> theta, const SearchConfig& cfg) {
    SearchEvaluation ev;
    ev.theta.assign(theta.begin(), theta.end());
    try {
        const TestFunction h = family.build(theta);
        const std::vector<TimeState> pts = check_points(problem, cfg);
        const DerivativeCheckReport dc = inspect_test_function(h, problem, pts);
        if (!dc.ok) {
            ev.rejection = "derivative check failed: " + dc.detail;
            return ev;
        }
        if (cfg.objective == Objective::dual_v2) {
            ev.estimate = dual_v2(problem, h, cfg.x, cfg.box, cfg.grid, cfg.exec);
        } else {
            ev.estimate = dual_v1(problem, h, cfg.x, cfg.n_paths, cfg.grid, cfg.dp, cfg.seed, cfg.exec);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFinite && e.code() != ErrorCode::DerivativeMismatch) throw;
        ev.rejection = e.what();
        return ev;
    }
    if (ev.estimate.boundary_attained) {
        ev.rejection = "supremum attained on the box boundary";
        return ev;
    }
    ev.valid = true;
    ev.objective = ev.estimate.value;
    return ev;
}

SearchTrace minimize_dual(const ControlProblem& problem, const ParametricFamily& family, const SearchConfig& cfg) {
    const std::size_t n = family.dim;
    if (family.initial.size() != n || family.scale.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "family initial point / scale do not match its dimension");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "family has no parameters");

    SearchTrace trace;
    trace.family_id = family.id;
    trace.objective = cfg.objective;
    trace.seed = cfg.seed;

    using Point = std::vector<double>;
    // Returns nullopt once the budget is spent.
    auto evaluate = [&](const Point& theta) -> std::optional<double> {
        if (trace.evaluations.size() > cfg.budget) return std::nullopt;
        SearchEvaluation ev = evaluate_candidate(problem, family, theta, cfg);
        ev.iteration = trace.evaluations.size();
        const double f = ev.objective;
        if (f < trace.evaluations[trace.best_index].objective)
            trace.best_index = ev.iteration;
        trace.evaluations.push_back(std::move(ev));
        return f;
    };

    std::vector<Point> simplex{family.initial};
    std::vector<double> fs;
    {
        trace.evaluations.reserve(cfg.budget + 1);
        SearchEvaluation ev = evaluate_candidate(problem, family, family.initial, cfg);
        fs.push_back(ev.objective);
        trace.evaluations.push_back(std::move(ev));
    }
    for (std::size_t i = 0; i < n; ++i) {
        Point v = family.initial;
        v[i] += family.scale[i];
        const auto f = evaluate(v);
        if (!f) break;
        simplex.push_back(std::move(v));
        fs.push_back(*f);
    }
    if (std::none_of(trace.evaluations.begin(), trace.evaluations.end(),
                     [](const SearchEvaluation& e) { return e.valid; }))
        throw Error(ErrorCode::AllCandidatesInvalid,
                    "every initial simplex vertex was rejected: " + trace.evaluations.front().rejection);
    if (simplex.size() < n + 1) return trace;

    auto affine = [](const Point& a, const Point& b, double s) {  // a + s (b - a)
        Point out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - a[i]);
        return out;
    };

    std::vector<std::size_t> order(n + 1);
    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double spread = 0.0, diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            if (std::isfinite(fs[i]) && std::isfinite(fs[best])) spread = std::max(spread, fs[i] - fs[best]);
            else if (i != best) spread = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < n; ++a) diameter = std::max(diameter, std::abs(simplex[i][a] - simplex[best][a]));
        }
        if (spread <= cfg.f_tolerance && diameter <= cfg.x_tolerance) break;

        Point centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t a = 0; a < n; ++a) centroid[a] += simplex[i][a];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        const Point xr = affine(centroid, simplex[worst], -1.0);
        const auto fr = evaluate(xr);
        if (!fr) break;
        if (*fr < fs[best]) {
            const Point xe = affine(centroid, simplex[worst], -2.0);
            const auto fe = evaluate(xe);
            if (!fe) {
                simplex[worst] = xr;
                fs[worst] = *fr;
                break;
            }
            if (*fe < *fr) {
                simplex[worst] = xe;
                fs[worst] = *fe;
            } else {
                simplex[worst] = xr;
                fs[worst] = *fr;
            }
            continue;
        }
        if (*fr < fs[second]) {
            simplex[worst] = xr;
            fs[worst] = *fr;
            continue;
        }
        const bool outside = *fr < fs[worst];
        const Point xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, simplex[worst], 0.5);
        const auto fc = evaluate(xc);
        if (!fc) break;
        if (outside ? *fc <= *fr : *fc < fs[worst]) {
            simplex[worst] = xc;
            fs[worst] = *fc;
            continue;
        }
        bool spent = false;
        for (std::size_t i = 0; i <= n && !spent; ++i) {
            if (i == best) continue;
            simplex[i] = affine(simplex[best], simplex[i], 0.5);
            const auto fi = evaluate(simplex[i]);
            if (!fi) spent = true;
            else fs[i] = *fi;
        }
        if (spent) break;
    }
    return trace;
}

GapReport gap_report(const BoundEstimate& primal, const BoundEstimate& dual, double allowance) {
    if (primal.problem_id != dual.problem_id)
        throw Error(ErrorCode::MismatchedProblem,
                    "gap report mixes problems '" + primal.problem_id + "' and '" + dual.problem_id + "'");
    if (primal.t != dual.t || primal.x.size() != dual.x.size() ||
        !std::equal(primal.x.begin(), primal.x.end(), dual.x.begin()))
        throw Error(ErrorCode::MismatchedProblem, "gap report estimates refer to different (t, x)");
    if (!(allowance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gap allowance must be >= 0");

    GapReport r;
    r.primal = primal;
    r.dual = dual;
    r.gap = dual.value - primal.value;
    r.combined_std_error = std::sqrt(primal.std_error * primal.std_error + dual.std_error * dual.std_error);
    const double scale = std::max(std::abs(primal.value), std::abs(dual.value));
    r.relative_gap = scale > 0.0 ? r.gap / scale : 0.0;
    r.allowance = allowance;
    r.boundary_attained = dual.boundary_attained;
    r.clamp_fraction = dual.clamp_fraction;
    r.failed = r.gap < -(3.0 * r.combined_std_error + allowance);
    return r;
}

double discretization_allowance(double dt, double scale, double kappa) {
    if (!(dt > 0.0) || !(kappa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "allowance needs dt > 0, kappa >= 0");
    return kappa * dt * (1.0 + std::abs(scale));
}

SandwichReport sandwich_check(const BoundEstimate& primal, const BoundEstimate& v1, const BoundEstimate& v2,
                              double allowance) {
    SandwichReport s;
    s.allowance = allowance;
    s.primal_v1 = gap_report(primal, v1, allowance);
    s.v1_v2 = gap_report(v1, v2, allowance);
    s.failed = s.primal_v1.failed || s.v1_v2.failed;
    return s;
}

}  // namespace dualbound
