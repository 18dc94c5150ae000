#pragma once

#include "dualbound/model.hpp"
#include "dualbound/parallel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dualbound {

/// Uniform grid on [start, end] with `steps` intervals.
struct TimeGrid {
    double start = 0.0;
    double end = 1.0;
    std::size_t steps = 1;

    [[nodiscard]] double dt() const { return (end - start) / static_cast<double>(steps); }
    // node(steps) == end exactly.
    [[nodiscard]] double node(std::size_t k) const {
        return k == steps ? end : start + (end - start) * static_cast<double>(k) / static_cast<double>(steps);
    }
    // Throws Error(InvalidArgument) unless steps >= 1 and start < end.
    void check() const;
};

/// Brownian increments on a TimeGrid, row-major steps x noise_dim.
struct BrownianPath {
    TimeGrid grid;
    std::size_t noise_dim = 1;
    std::vector<double> increments;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] std::span<const double> increment(std::size_t k) const {
        return std::span<const double>(increments).subspan(k * noise_dim, noise_dim);
    }
};

// N(0, dt) increments, deterministic in (seed, stream_id).
BrownianPath sample_brownian(const TimeGrid& grid, std::size_t noise_dim, std::uint64_t seed, std::uint64_t stream_id);

struct TrajectoryRecord {
    std::size_t state_dim = 1;
    std::size_t control_dim = 1;
    std::vector<double> states;    // (steps + 1) x state_dim
    std::vector<double> controls;  // steps x control_dim
    double running_reward = 0.0;   // sum of l dt
    double penalty = 0.0;          // sum of (dx h)^T sigma dW
    Vec terminal_state;
};

// Euler-Maruyama under a feedback policy along a fixed Brownian path. When h
// is supplied the left-point Ito sum of (dx h)^T sigma dW is accumulated.
// Throws Error(NonFinite) naming the step at which the state blew up.
TrajectoryRecord integrate(const ControlProblem& problem, const Policy& policy, const BrownianPath& path,
                           const Vec& x0, const TestFunction* h = nullptr);

// Running reward, penalty and terminal state without storing the trajectory.
struct PathOutcome {
    double running_reward = 0.0;
    double penalty = 0.0;
    Vec terminal_state;
};

PathOutcome simulate_path(const ControlProblem& problem, const Policy& policy, const BrownianPath& path,
                          const Vec& x0, const TestFunction* h);

// Mean and standard error of the penalty over n_paths paths (streams
// 0..n_paths-1 of `seed`).
MeanEstimate penalty_mean_test(const ControlProblem& problem, const Policy& policy, const TestFunction& h,
                               const Vec& x0, std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed,
                               Execution exec = Execution::parallel);

}  // namespace dualbound
