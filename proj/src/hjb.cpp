#include "dualbound/hjb.hpp"
#include "dualbound/hamiltonian.hpp"

#include <cmath>
#include <limits>

namespace dualbound {

std::string_view classification_name(Classification c) {
    switch (c) {
        case Classification::solution: return "solution";
        case Classification::supersolution: return "supersolution";
        case Classification::subsolution: return "subsolution";
        case Classification::neither: return "neither";
    }
    return "neither";
}

double hjb_residual_at(const ControlProblem& problem, const TestFunction& h, double t, const Vec& y) {
    const Jet j = h.jet(t, y);
    const double r = -j.dt - hamiltonian_sup(problem, {t, y, j.dx, j.dxx}).value;
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "HJB residual is not finite");
    return r;
}

namespace {

struct Accumulator {
    ResidualStats stats{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0, {}, {}};
    double sum = 0.0;
    std::size_t n = 0;

    void add(double v, double t, const Vec& y) {
        if (v < stats.min) stats.min = v, stats.argmin = {t, y};
        if (v > stats.max) stats.max = v, stats.argmax = {t, y};
        sum += v;
        ++n;
    }
    ResidualStats finish() {
        stats.mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
        return stats;
    }
};

}  // namespace

std::vector<double> interior_times(double t0, double T, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = t0 + (T - t0) * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return out;
}

HJBReport hjb_residual(const ControlProblem& problem, const TestFunction& h, std::span<const double> time_points,
                       const SpatialBox& box, double tau, Execution exec) {
    problem.check();
    box.check(problem.state_dim);
    if (time_points.empty()) throw Error(ErrorCode::InvalidArgument, "hjb_residual needs at least one time point");
    if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "classification tolerance must be >= 0");

    const std::vector<Vec> nodes = tensor_grid(box.lower, box.upper, box.points);
    const std::size_t n_space = nodes.size();
    const std::size_t n_total = time_points.size() * n_space;

    std::vector<double> residual(n_total);
    for_each_index(n_total, exec, [&](std::size_t i) {
        residual[i] = hjb_residual_at(problem, h, time_points[i / n_space], nodes[i % n_space]);
    });

    Accumulator res, term;
    for (std::size_t i = 0; i < n_total; ++i) res.add(residual[i], time_points[i / n_space], nodes[i % n_space]);
    for (const Vec& y : nodes) {
        const double m = h(problem.T, y) - problem.terminal_reward(y);
        if (!std::isfinite(m)) throw Error(ErrorCode::NonFinite, "terminal mismatch is not finite");
        term.add(m, problem.T, y);
    }

    HJBReport report;
    report.time_points.assign(time_points.begin(), time_points.end());
    report.box = box;
    report.tau = tau;
    report.residual = res.finish();
    report.terminal_mismatch = term.finish();

    const ResidualStats& r = report.residual;
    const ResidualStats& m = report.terminal_mismatch;
    if (std::max(std::abs(r.min), std::abs(r.max)) <= tau && std::max(std::abs(m.min), std::abs(m.max)) <= tau)
        report.classification = Classification::solution;
    else if (r.min >= -tau && m.min >= -tau)
        report.classification = Classification::supersolution;
    else if (r.max <= tau && m.max <= tau)
        report.classification = Classification::subsolution;
    else
        report.classification = Classification::neither;
    return report;
}

std::pair<bool, HJBReport> supersolution_probe(const ControlProblem& problem, const TestFunction& h,
                                               const SpatialBox& box, std::span<const double> time_points, double tau,
                                               Execution exec) {
    HJBReport report = hjb_residual(problem, h, time_points, box, tau, exec);
    const bool super = report.classification == Classification::solution ||
                       report.classification == Classification::supersolution;
    return {super, std::move(report)};
}

}  // namespace dualbound
