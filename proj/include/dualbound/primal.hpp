#pragma once

#include "dualbound/estimate.hpp"
#include "dualbound/model.hpp"
#include "dualbound/parallel.hpp"
#include "dualbound/paths.hpp"

namespace dualbound {

// Monte-Carlo estimate of J(t, x, policy) = E[sum l dt + g(X_T)], with
// t = grid.start. Path i uses stream i of `seed`, so two policies run with
// the same seed see identical noise.
BoundEstimate primal_bound(const ControlProblem& problem, const Policy& policy, const Vec& x, std::size_t n_paths,
                           const TimeGrid& grid, std::uint64_t seed, Execution exec = Execution::parallel);

// Per-path rewards behind primal_bound (useful for paired comparisons).
std::vector<double> primal_samples(const ControlProblem& problem, const Policy& policy, const Vec& x,
                                   std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed,
                                   Execution exec = Execution::parallel);

}  // namespace dualbound
