#include "dualbound/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualbound {

double hcv(const ControlProblem& problem, const HamiltonianQuery& query, const Vec& u) {
    const Vec b = problem.drift(query.t, query.x, u);
    const Mat sigma = problem.diffusion(query.t, query.x, u);
    const double l = problem.running_reward(query.t, query.x, u);
    const double value = dot(b, query.p) + 0.5 * diffusion_trace(sigma, query.Z) + l;
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFinite, "current-value Hamiltonian is not finite");
    return value;
}

std::vector<Vec> hamiltonian_candidates(const ControlBox& box, const HamiltonianQuery& query) {
    if (!box.has_argmax()) return box.grid();
    std::vector<Vec> out = box.corners();
    const Vec hook = box.argmax()(query.t, query.x, query.p, query.Z);
    if (hook.size() != box.dim()) throw Error(ErrorCode::DimensionMismatch, "argmax hook returned wrong dimension");
    if (!all_finite(hook)) throw Error(ErrorCode::NonFinite, "argmax hook returned a non-finite control");
    out.push_back(box.clamp(hook));
    std::sort(out.begin(), out.end());
    return out;
}

HamiltonianValue hamiltonian_sup(const ControlProblem& problem, const HamiltonianQuery& query) {
    HamiltonianValue best{-std::numeric_limits<double>::infinity(), {}};
    auto scan = [&](const std::vector<Vec>& controls) {
        for (const Vec& u : controls) {
            const double v = hcv(problem, query, u);
            if (v > best.value) best = {v, u};
        }
    };
    if (problem.controls.has_argmax())
        scan(hamiltonian_candidates(problem.controls, query));
    else
        scan(problem.controls.grid());
    return best;
}

}  // namespace dualbound
