#include "dualbound/primal.hpp"

#include <cmath>
#include <string>

namespace dualbound {

std::string_view kind_name(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::primal: return "primal";
        case EstimateKind::dual_v1: return "dual_v1";
        case EstimateKind::dual_v2: return "dual_v2";
        case EstimateKind::oracle: return "oracle";
    }
    return "unknown";
}

std::vector<double> primal_samples(const ControlProblem& problem, const Policy& policy, const Vec& x,
                                   std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed, Execution exec) {
    problem.check();
    grid.check();
    if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "primal_bound needs n_paths >= 2");

    std::vector<double> reward(n_paths);
    for_each_index(n_paths, exec, [&](std::size_t i) {
        const BrownianPath path = sample_brownian(grid, problem.noise_dim, seed, i);
        const PathOutcome o = simulate_path(problem, policy, path, x, nullptr);
        const double total = o.running_reward + problem.terminal_reward(o.terminal_state);
        if (!std::isfinite(total))
            throw Error(ErrorCode::NonFinite, "reward on path " + std::to_string(i) + " is not finite");
        reward[i] = total;
    });
    return reward;
}

BoundEstimate primal_bound(const ControlProblem& problem, const Policy& policy, const Vec& x, std::size_t n_paths,
                           const TimeGrid& grid, std::uint64_t seed, Execution exec) {
    const std::vector<double> reward = primal_samples(problem, policy, x, n_paths, grid, seed, exec);
    const MeanEstimate m = summarize(reward);

    BoundEstimate est;
    est.kind = EstimateKind::primal;
    est.value = m.mean;
    est.std_error = m.std_error;
    est.n_paths = n_paths;
    est.dt = grid.dt();
    est.n_steps = grid.steps;
    est.seed = seed;
    est.problem_id = problem.id;
    est.source_id = policy.label();
    est.t = grid.start;
    est.x = x;
    return est;
}

}  // namespace dualbound
