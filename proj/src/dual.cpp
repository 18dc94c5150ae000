#include "dualbound/dual.hpp"

#include <algorithm>
#include <cmath>

namespace dualbound {

BoundEstimate dual_v2(const ControlProblem& problem, const TestFunction& h, const Vec& x, const SpatialBox& box,
                      const TimeGrid& grid, Execution exec) {
    problem.check();
    grid.check();
    box.check(problem.state_dim);
    if (grid.end != problem.T || grid.start < problem.t0)
        throw Error(ErrorCode::InvalidArgument, "time grid must end at T and start inside [t0, T)");
    if (x.size() != problem.state_dim) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong dimension");

    std::vector<SpatialSup> sups(grid.steps);
    for_each_index(grid.steps, exec,
                   [&](std::size_t k) { sups[k] = pointwise_hjb_sup(problem, h, grid.node(k), box); });
    const SpatialSup terminal = terminal_gap_sup(problem, h, box);

    const double dt = grid.dt();
    double integral = 0.0;
    bool boundary = terminal.on_boundary;
    for (const SpatialSup& s : sups) {
        integral += dt * s.value;
        boundary = boundary || s.on_boundary;
    }

    BoundEstimate est;
    est.kind = EstimateKind::dual_v2;
    est.value = h.value(grid.start, x) + integral + terminal.value;
    est.std_error = 0.0;
    est.n_paths = 0;
    est.dt = dt;
    est.n_steps = grid.steps;
    est.problem_id = problem.id;
    est.source_id = h.id;
    est.t = grid.start;
    est.x = x;
    est.boundary_attained = boundary;
    est.terminal_gap = terminal.value - h.offset;
    if (!std::isfinite(est.value)) throw Error(ErrorCode::NonFinite, "dual_v2 estimate is not finite");
    return est;
}

DegeneracyReport degeneracy_diagnostic(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                       std::size_t n_paths, const TimeGrid& grid, const PathwiseDPConfig& cfg,
                                       const SpatialBox& box, std::uint64_t seed, double tolerance, Execution exec) {
    if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "degeneracy diagnostic needs n_paths >= 2");
    DegeneracyReport r;
    r.tolerance = tolerance;
    const std::vector<PathwiseResult> per_path = pathwise_values(problem, h, x, n_paths, grid, cfg, seed, exec);
    r.v1 = summarize_pathwise(problem, h, x, grid, cfg, seed, per_path);
    r.v2 = dual_v2(problem, h, x, box, grid, exec);
    r.pointwise = r.v2.value - h.value(grid.start, x);
    r.pathwise.reserve(n_paths);
    r.gap.reserve(n_paths);
    std::size_t degenerate = 0;
    for (const PathwiseResult& p : per_path) {
        r.pathwise.push_back(p.value);
        const double g = r.pointwise - p.value;
        r.gap.push_back(g);
        if (std::abs(g) <= tolerance) ++degenerate;
    }
    const MeanEstimate m = summarize(r.gap);
    r.mean_gap = m.mean;
    r.gap_std_error = m.std_error;
    std::vector<double> sorted = r.gap;
    std::sort(sorted.begin(), sorted.end());
    r.min_gap = sorted.front();
    r.max_gap = sorted.back();
    const std::size_t mid = sorted.size() / 2;
    r.median_gap = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    r.fraction_degenerate = static_cast<double>(degenerate) / static_cast<double>(n_paths);
    return r;
}

}  // namespace dualbound
