#include "dualbound/dual.hpp"
#include "dualbound/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualbound {

namespace {

constexpr int kGoldenIterations = 40;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

double checked(double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "objective of the spatial supremum is not finite");
    return v;
}

}  // namespace

void SpatialBox::check(std::size_t state_dim) const {
    if (lower.size() != state_dim || upper.size() != state_dim || points.size() != state_dim)
        throw Error(ErrorCode::DimensionMismatch, "spatial box dimension does not match the state dimension");
    for (std::size_t a = 0; a < state_dim; ++a) {
        if (!(lower[a] < upper[a])) throw Error(ErrorCode::InvalidArgument, "spatial box requires lower < upper");
        if (points[a] < 2) throw Error(ErrorCode::InvalidArgument, "spatial box needs >= 2 points per axis");
    }
    if (refinement_levels < 0) throw Error(ErrorCode::InvalidArgument, "refinement levels must be >= 0");
}

SpatialSup maximize_over_box(const std::function<double(const Vec&)>& f, const SpatialBox& box) {
    const std::size_t d = box.lower.size();
    const std::vector<Vec> nodes = tensor_grid(box.lower, box.upper, box.points);

    double best = -std::numeric_limits<double>::infinity();
    double interior_best = -std::numeric_limits<double>::infinity();
    double boundary_best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t flat = 0; flat < nodes.size(); ++flat) {
        const double v = checked(f(nodes[flat]));
        bool boundary = false;
        for (std::size_t a = 0; a < d; ++a)
            if (idx[a] == 0 || idx[a] + 1 == box.points[a]) boundary = true;
        if (boundary)
            boundary_best = std::max(boundary_best, v);
        else
            interior_best = std::max(interior_best, v);
        if (v > best) {
            best = v;
            best_idx = flat;
        }
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < box.points[a]) break;
            idx[a] = 0;
        }
    }

    SpatialSup out{best, nodes[best_idx], false};
    const double slack = 1e-9 * (1.0 + std::abs(best));
    out.on_boundary = boundary_best > interior_best + slack;

    Vec spacing(d);
    for (std::size_t a = 0; a < d; ++a)
        spacing[a] = (box.upper[a] - box.lower[a]) / static_cast<double>(box.points[a] - 1);

    for (int level = 1; level <= box.refinement_levels; ++level) {
        const double shrink = std::ldexp(1.0, -(level - 1));
        for (std::size_t a = 0; a < d; ++a) {
            double lo = std::max(box.lower[a], out.argmax[a] - spacing[a] * shrink);
            double hi = std::min(box.upper[a], out.argmax[a] + spacing[a] * shrink);
            Vec probe = out.argmax;
            auto eval = [&](double s) {
                probe[a] = s;
                const double v = checked(f(probe));
                if (v > out.value) {
                    out.value = v;
                    out.argmax = probe;
                }
                return v;
            };
            double c = hi - kInvPhi * (hi - lo);
            double e = lo + kInvPhi * (hi - lo);
            double fc = eval(c);
            double fe = eval(e);
            for (int it = 0; it < kGoldenIterations; ++it) {
                if (fc > fe) {
                    hi = e;
                    e = c;
                    fe = fc;
                    c = hi - kInvPhi * (hi - lo);
                    fc = eval(c);
                } else {
                    lo = c;
                    c = e;
                    fc = fe;
                    e = lo + kInvPhi * (hi - lo);
                    fe = eval(e);
                }
            }
        }
    }
    return out;
}

SpatialSup pointwise_hjb_sup(const ControlProblem& problem, const TestFunction& h, double t, const SpatialBox& box) {
    return maximize_over_box(
        [&](const Vec& y) {
            const Jet j = h.jet(t, y);
            return j.dt + hamiltonian_sup(problem, {t, y, j.dx, j.dxx}).value;
        },
        box);
}

SpatialSup terminal_gap_sup(const ControlProblem& problem, const TestFunction& h, const SpatialBox& box) {
    return maximize_over_box([&](const Vec& y) { return problem.terminal_reward(y) - h.value(problem.T, y); }, box);
}

}  // namespace dualbound
