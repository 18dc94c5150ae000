#include "dualbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dualbound {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

double rel_error(double supplied, double reference) {
    return std::abs(supplied - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace

std::vector<Vec> tensor_grid(const Vec& lower, const Vec& upper, const std::vector<std::size_t>& points) {
    const std::size_t dim = lower.size();
    std::size_t total = 1;
    for (std::size_t n : points) total *= n;

    std::vector<Vec> out;
    out.reserve(total);
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vec u(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            u[a] = points[a] == 1 ? lower[a]
                                  : lower[a] + (upper[a] - lower[a]) * static_cast<double>(idx[a]) /
                                                   static_cast<double>(points[a] - 1);
        }
        out.push_back(u);
        for (std::size_t a = dim; a-- > 0;) {
            if (++idx[a] < points[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

ControlBox::ControlBox(Vec lower, Vec upper, std::vector<std::size_t> points, ArgmaxHook argmax)
    : lower_(std::move(lower)), upper_(std::move(upper)), points_(std::move(points)), argmax_(std::move(argmax)) {
    require(!lower_.empty(), "control box must have dimension >= 1");
    require(lower_.size() == upper_.size() && points_.size() == lower_.size(), "control box dimension mismatch");
    for (std::size_t a = 0; a < lower_.size(); ++a) {
        require(std::isfinite(lower_[a]) && std::isfinite(upper_[a]), "control box bounds must be finite");
        require(lower_[a] <= upper_[a], "control box is empty (lower > upper)");
        require(points_[a] >= 1, "control grid needs at least one point per axis");
        if (lower_[a] == upper_[a]) points_[a] = 1;  // a degenerate axis has a single control
    }
    grid_ = tensor_grid(lower_, upper_, points_);
    std::vector<std::size_t> two(lower_.size(), 2);
    for (std::size_t a = 0; a < lower_.size(); ++a)
        if (lower_[a] == upper_[a]) two[a] = 1;
    corners_ = tensor_grid(lower_, upper_, two);
}

Vec ControlBox::clamp(const Vec& u) const {
    Vec out(u.size());
    for (std::size_t a = 0; a < u.size(); ++a) out[a] = std::clamp(u[a], lower_[a], upper_[a]);
    return out;
}

bool ControlBox::contains(const Vec& u) const {
    if (u.size() != dim()) return false;
    for (std::size_t a = 0; a < u.size(); ++a)
        if (!(u[a] >= lower_[a] && u[a] <= upper_[a])) return false;
    return true;
}

ControlBox ControlBox::with_points(std::vector<std::size_t> points) const {
    return ControlBox(lower_, upper_, std::move(points), argmax_);
}

void ControlProblem::check() const {
    require(state_dim >= 1 && state_dim <= kMaxDim, "state dimension must be in [1, kMaxDim]");
    require(noise_dim >= 1 && noise_dim <= kMaxDim, "noise dimension must be in [1, kMaxDim]");
    require(controls.dim() <= kMaxDim, "control dimension exceeds kMaxDim");
    require(std::isfinite(t0) && std::isfinite(T) && t0 < T, "time horizon requires t0 < T");
    require(drift && diffusion && running_reward && terminal_reward, "control problem has an unset callable");
}

TestFunction TestFunction::shifted(double c) const {
    TestFunction out = *this;
    out.id = id + "+shift";
    out.offset = offset + c;
    out.terminal_matches_g = terminal_matches_g && c == 0.0;
    return out;
}

Policy::Policy(std::string label, std::function<Vec(double, const Vec&)> feedback, const ControlBox& box)
    : label_(std::move(label)), feedback_(std::move(feedback)), lower_(box.lower()), upper_(box.upper()) {}

Policy Policy::constant(const ControlBox& box, Vec u) {
    std::ostringstream label;
    label << "constant";
    for (double v : u) label << ':' << v;
    return Policy(label.str(), [u](double, const Vec&) { return u; }, box);
}

Vec Policy::clamp(const Vec& u) const {
    if (u.size() != lower_.size())
        throw Error(ErrorCode::DimensionMismatch, "policy '" + label_ + "' returned a control of wrong dimension");
    Vec out(u.size());
    for (std::size_t a = 0; a < u.size(); ++a) out[a] = std::clamp(u[a], lower_[a], upper_[a]);
    return out;
}

bool ValidationReport::ok() const {
    return std::all_of(probes.begin(), probes.end(), [](const ProbeResult& p) { return p.passed; });
}

ValidationReport inspect_problem(const ControlProblem& problem, std::span<const Probe> probes) {
    problem.check();
    if (probes.empty()) throw Error(ErrorCode::InvalidArgument, "validate_problem needs at least one probe");

    ValidationReport report;
    for (const Probe& probe : probes) {
        ProbeResult r;
        r.probe = probe;
        auto fail = [&r](ErrorCode code, std::string why) {
            if (r.passed) {
                r.passed = false;
                r.failure = code;
                r.detail = std::move(why);
            }
        };
        if (probe.t < problem.t0 || probe.t > problem.T)
            throw Error(ErrorCode::InvalidArgument, "probe time outside [t0, T]");
        if (probe.x.size() != problem.state_dim)
            throw Error(ErrorCode::InvalidArgument, "probe state has wrong dimension");
        if (!problem.controls.contains(probe.u))
            throw Error(ErrorCode::InvalidArgument, "probe control outside the control box");

        r.drift = problem.drift(probe.t, probe.x, probe.u);
        r.diffusion = problem.diffusion(probe.t, probe.x, probe.u);
        r.running_reward = problem.running_reward(probe.t, probe.x, probe.u);

        if (r.drift.size() != problem.state_dim) fail(ErrorCode::DimensionMismatch, "drift returned wrong length");
        if (r.diffusion.rows != problem.state_dim || r.diffusion.cols != problem.noise_dim ||
            r.diffusion.data.size() != r.diffusion.rows * r.diffusion.cols)
            fail(ErrorCode::DimensionMismatch, "diffusion returned wrong shape");
        if (!all_finite(r.drift)) fail(ErrorCode::NonFinite, "drift is not finite");
        if (!all_finite(r.diffusion)) fail(ErrorCode::NonFinite, "diffusion is not finite");
        if (!std::isfinite(r.running_reward)) fail(ErrorCode::NonFinite, "running reward is not finite");
        const double g = problem.terminal_reward(probe.x);
        if (!std::isfinite(g)) fail(ErrorCode::NonFinite, "terminal reward is not finite");
        report.probes.push_back(std::move(r));
    }
    return report;
}

ValidationReport validate_problem(const ControlProblem& problem, std::span<const Probe> probes) {
    ValidationReport report = inspect_problem(problem, probes);
    for (std::size_t i = 0; i < report.probes.size(); ++i) {
        const ProbeResult& r = report.probes[i];
        if (!r.passed)
            throw Error(*r.failure, "probe " + std::to_string(i) + " of problem '" + problem.id + "': " + r.detail);
    }
    return report;
}

DerivativeCheckReport inspect_test_function(const TestFunction& h, const ControlProblem& problem,
                                            std::span<const TimeState> points) {
    if (!h.value || !h.dt || !h.dx || !h.dxx)
        throw Error(ErrorCode::InvalidArgument, "test function '" + h.id + "' has an unset callable");
    const std::size_t d = problem.state_dim;
    const double eps = kFiniteDifferenceStep;

    DerivativeCheckReport report;
    auto note = [&report](const std::string& what) {
        if (report.detail.empty()) report.detail = what;
    };

    for (const TimeState& at : points) {
        if (at.x.size() != d) throw Error(ErrorCode::InvalidArgument, "check point has wrong state dimension");
        DerivativeCheckPoint cp;
        cp.at = at;
        const double t = at.t;
        const Jet j = h.jet(t, at.x);

        if (j.dx.size() != d || j.dxx.rows != d || j.dxx.cols != d)
            throw Error(ErrorCode::DimensionMismatch, "test function '" + h.id + "' returned wrong derivative shape");
        if (!std::isfinite(j.value) || !std::isfinite(j.dt) || !all_finite(j.dx) || !all_finite(j.dxx))
            throw Error(ErrorCode::NonFinite, "test function '" + h.id + "' is not finite at a check point");

        // Time derivative: central where the stencil fits inside [t0, T],
        // second-order one-sided otherwise.
        double fd_t;
        if (t + eps <= problem.T && t - eps >= problem.t0) {
            fd_t = (h.value(t + eps, at.x) - h.value(t - eps, at.x)) / (2 * eps);
        } else if (t + eps > problem.T) {
            fd_t = (3 * h.value(t, at.x) - 4 * h.value(t - eps, at.x) + h.value(t - 2 * eps, at.x)) / (2 * eps);
        } else {
            fd_t = (-3 * h.value(t, at.x) + 4 * h.value(t + eps, at.x) - h.value(t + 2 * eps, at.x)) / (2 * eps);
        }
        cp.dt_error = rel_error(j.dt, fd_t);

        for (std::size_t i = 0; i < d; ++i) {
            Vec xp = at.x, xm = at.x;
            xp[i] += eps;
            xm[i] -= eps;
            const double fd_x = (h.value(t, xp) - h.value(t, xm)) / (2 * eps);
            cp.dx_error = std::max(cp.dx_error, rel_error(j.dx[i], fd_x));

            const Vec gp = h.dx(t, xp), gm = h.dx(t, xm);
            for (std::size_t r = 0; r < d; ++r) {
                const double fd_xx = (gp[r] - gm[r]) / (2 * eps);
                cp.dxx_error = std::max(cp.dxx_error, rel_error(j.dxx(r, i), fd_xx));
            }
        }
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = r + 1; c < d; ++c)
                cp.symmetry_error = std::max(cp.symmetry_error, std::abs(j.dxx(r, c) - j.dxx(c, r)));

        if (h.terminal_matches_g) {
            cp.terminal_error = std::abs(h(problem.T, at.x) - problem.terminal_reward(at.x));
            if (*cp.terminal_error > kTerminalTolerance) {
                report.ok = false;
                note("h(T, x) differs from g(x)");
            }
        }

        const double worst = std::max({cp.dt_error, cp.dx_error, cp.dxx_error});
        report.max_error = std::max(report.max_error, worst);
        if (cp.dt_error > kDerivativeTolerance) note("dt disagrees with finite differences");
        if (cp.dx_error > kDerivativeTolerance) note("dx disagrees with finite differences");
        if (cp.dxx_error > kDerivativeTolerance) note("dxx disagrees with finite differences");
        if (cp.symmetry_error > kSymmetryTolerance) note("dxx is not symmetric");
        if (worst > kDerivativeTolerance || cp.symmetry_error > kSymmetryTolerance) report.ok = false;
        report.points.push_back(std::move(cp));
    }
    return report;
}

DerivativeCheckReport check_test_function(const TestFunction& h, const ControlProblem& problem,
                                          std::span<const TimeState> points) {
    DerivativeCheckReport report = inspect_test_function(h, problem, points);
    if (!report.ok)
        throw Error(ErrorCode::DerivativeMismatch, "test function '" + h.id + "': " + report.detail);
    return report;
}

}  // namespace dualbound
