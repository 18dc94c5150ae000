#include "dualbound/paths.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dualbound {

void TimeGrid::check() const {
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "time grid needs at least one step");
    if (!(std::isfinite(start) && std::isfinite(end) && start < end))
        throw Error(ErrorCode::InvalidArgument, "time grid requires start < end");
}

BrownianPath sample_brownian(const TimeGrid& grid, std::size_t noise_dim, std::uint64_t seed, std::uint64_t stream_id) {
    grid.check();
    if (noise_dim < 1) throw Error(ErrorCode::InvalidArgument, "noise dimension must be >= 1");

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(grid.dt());

    BrownianPath path{grid, noise_dim, std::vector<double>(grid.steps * noise_dim), seed, stream_id};
    for (double& dw : path.increments) dw = scale * normal(engine);
    return path;
}

namespace {

template <class OnStep>
PathOutcome run_euler(const ControlProblem& problem, const Policy& policy, const BrownianPath& path, const Vec& x0,
                      const TestFunction* h, OnStep&& on_step) {
    const std::size_t d = problem.state_dim;
    if (x0.size() != d) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong dimension");
    if (!all_finite(x0)) throw Error(ErrorCode::NonFinite, "initial state is not finite");
    if (path.noise_dim != problem.noise_dim) throw Error(ErrorCode::DimensionMismatch, "path noise dimension mismatch");

    const TimeGrid& grid = path.grid;
    if (grid.end != problem.T || grid.start < problem.t0)
        throw Error(ErrorCode::InvalidArgument, "path grid must end at T and start inside [t0, T)");
    const double dt = grid.dt();
    PathOutcome out;
    Vec x = x0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.node(k);
        const Vec u = policy(t, x);
        const Vec b = problem.drift(t, x, u);
        const Mat sigma = problem.diffusion(t, x, u);
        if (b.size() != d || sigma.rows != d || sigma.cols != problem.noise_dim)
            throw Error(ErrorCode::DimensionMismatch, "drift/diffusion shape mismatch at step " + std::to_string(k));
        const auto dW = path.increment(k);

        out.running_reward += problem.running_reward(t, x, u) * dt;
        if (h != nullptr) {
            const Vec p = h->dx(t, x);
            for (std::size_t j = 0; j < sigma.cols; ++j) {
                double row = 0.0;
                for (std::size_t i = 0; i < d; ++i) row += p[i] * sigma(i, j);
                out.penalty += row * dW[j];
            }
        }
        on_step(k, u);
        x = euler_step(x, b, sigma, dW, dt);
        if (!all_finite(x))
            throw Error(ErrorCode::NonFinite, "state is not finite after step " + std::to_string(k) + " (stream " +
                                                  std::to_string(path.stream_id) + ")");
        on_step.state(x);
    }
    if (!std::isfinite(out.running_reward) || !std::isfinite(out.penalty))
        throw Error(ErrorCode::NonFinite, "running reward or penalty is not finite (stream " +
                                              std::to_string(path.stream_id) + ")");
    out.terminal_state = x;
    return out;
}

struct NoRecord {
    void operator()(std::size_t, const Vec&) const {}
    void state(const Vec&) const {}
};

struct Recorder {
    TrajectoryRecord* rec;
    void operator()(std::size_t, const Vec& u) const { rec->controls.insert(rec->controls.end(), u.begin(), u.end()); }
    void state(const Vec& x) const { rec->states.insert(rec->states.end(), x.begin(), x.end()); }
};

}  // namespace

PathOutcome simulate_path(const ControlProblem& problem, const Policy& policy, const BrownianPath& path,
                          const Vec& x0, const TestFunction* h) {
    return run_euler(problem, policy, path, x0, h, NoRecord{});
}

TrajectoryRecord integrate(const ControlProblem& problem, const Policy& policy, const BrownianPath& path,
                           const Vec& x0, const TestFunction* h) {
    TrajectoryRecord rec;
    rec.state_dim = problem.state_dim;
    rec.control_dim = problem.control_dim();
    rec.states.reserve((path.grid.steps + 1) * problem.state_dim);
    rec.controls.reserve(path.grid.steps * problem.control_dim());
    rec.states.assign(x0.begin(), x0.end());
    const PathOutcome o = run_euler(problem, policy, path, x0, h, Recorder{&rec});
    rec.running_reward = o.running_reward;
    rec.penalty = o.penalty;
    rec.terminal_state = o.terminal_state;
    return rec;
}

MeanEstimate penalty_mean_test(const ControlProblem& problem, const Policy& policy, const TestFunction& h,
                               const Vec& x0, std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed,
                               Execution exec) {
    problem.check();
    grid.check();
    if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "penalty_mean_test needs n_paths >= 2");

    std::vector<double> penalty(n_paths);
    auto one = [&](std::size_t i) {
        const BrownianPath path = sample_brownian(grid, problem.noise_dim, seed, i);
        penalty[i] = simulate_path(problem, policy, path, x0, &h).penalty;
    };

    for_each_index(n_paths, exec, one);
    return summarize(penalty);
}

}  // namespace dualbound
