#pragma once

#include "dualbound/dual.hpp"
#include "dualbound/estimate.hpp"
#include "dualbound/model.hpp"
#include "dualbound/parallel.hpp"
#include "dualbound/paths.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace dualbound {

enum class Objective { dual_v1, dual_v2 };

std::string_view objective_name(Objective o);

struct SearchConfig {
    Objective objective = Objective::dual_v2;
    Vec x;
    TimeGrid grid;                 // t = grid.start
    SpatialBox box;                // dual_v2 supremum box; also spans the derivative-check points
    PathwiseDPConfig dp;           // dual_v1 only
    std::size_t n_paths = 1000;    // dual_v1 only
    std::uint64_t seed = 0;        // shared by every candidate
    std::size_t budget = 200;      // evaluations after the initial one
    // Early stop once the simplex values and vertices have collapsed.
    double f_tolerance = 1e-12;
    double x_tolerance = 1e-10;
    Execution exec = Execution::parallel;
};

struct SearchEvaluation {
    std::size_t iteration = 0;
    std::vector<double> theta;
    BoundEstimate estimate;  // default when the candidate was rejected before evaluation
    double objective = std::numeric_limits<double>::infinity();
    bool valid = false;
    std::string rejection;
};

struct SearchTrace {
    std::string family_id;
    Objective objective = Objective::dual_v2;
    std::uint64_t seed = 0;
    std::vector<SearchEvaluation> evaluations;
    std::size_t best_index = 0;

    [[nodiscard]] const SearchEvaluation& best() const { return evaluations.at(best_index); }
};

// Running minimum of the objective along the trace.
std::vector<double> best_so_far(const SearchTrace& trace);

// Objective for a single parameter vector, with the same validity rules as
// the search (derivative check, boundary flag, non-finite values).
SearchEvaluation evaluate_candidate(const ControlProblem& problem, const ParametricFamily& family,
                                    std::span<const double> theta, const SearchConfig& cfg);

/// Nelder-Mead over the family parameters (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). The initial simplex is family.initial plus
/// family.scale[i] along each axis. Rejected candidates score +inf.
/// Throws AllCandidatesInvalid if every evaluated initial vertex is rejected.
SearchTrace minimize_dual(const ControlProblem& problem, const ParametricFamily& family, const SearchConfig& cfg);

struct GapReport {
    BoundEstimate primal;
    BoundEstimate dual;
    double gap = 0.0;
    double combined_std_error = 0.0;
    double relative_gap = 0.0;
    double allowance = 0.0;
    bool boundary_attained = false;
    double clamp_fraction = 0.0;
    // gap < -(3 combined_std_error + allowance): weak duality violated beyond noise.
    bool failed = false;
};

// Throws MismatchedProblem unless both estimates refer to the same problem
// and the same (t, x).
GapReport gap_report(const BoundEstimate& primal, const BoundEstimate& dual, double allowance = 0.0);

// Slack for time-discretisation bias: kappa * dt * (1 + |scale|).
inline constexpr double kDefaultAllowanceFactor = 3.0;
double discretization_allowance(double dt, double scale, double kappa = kDefaultAllowanceFactor);

/// primal <= dual_v1 <= dual_v2, each link tested as a gap report with the
/// same allowance. Failed when either link is violated beyond
/// 3 combined standard errors plus the allowance.
struct SandwichReport {
    GapReport primal_v1;
    GapReport v1_v2;
    double allowance = 0.0;
    bool failed = false;
};

SandwichReport sandwich_check(const BoundEstimate& primal, const BoundEstimate& v1, const BoundEstimate& v2,
                              double allowance);

}  // namespace dualbound
