#pragma once

#include "dualbound/dual.hpp"
#include "dualbound/model.hpp"
#include "dualbound/parallel.hpp"

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dualbound {

enum class Classification { solution, supersolution, subsolution, neither };

std::string_view classification_name(Classification c);

struct ResidualStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    TimeState argmin;
    TimeState argmax;
};

/// HJB residual r(t, y) = -dt h - H(t, y, dx h, dxx h) on a tensor grid and
/// the terminal mismatch h(T, y) - g(y), classified at tolerance tau:
///   solution       max|r| <= tau and max|h(T)-g| <= tau
///   supersolution  min r >= -tau and min (h(T)-g) >= -tau
///   subsolution    max r <= tau  and max (h(T)-g) <= tau
struct HJBReport {
    std::vector<double> time_points;
    SpatialBox box;
    double tau = 0.0;
    ResidualStats residual;
    ResidualStats terminal_mismatch;
    Classification classification = Classification::neither;
};

HJBReport hjb_residual(const ControlProblem& problem, const TestFunction& h, std::span<const double> time_points,
                       const SpatialBox& box, double tau, Execution exec = Execution::parallel);

// Residual at a single point.
double hjb_residual_at(const ControlProblem& problem, const TestFunction& h, double t, const Vec& y);

// True iff h classifies as supersolution (or solution).
std::pair<bool, HJBReport> supersolution_probe(const ControlProblem& problem, const TestFunction& h,
                                               const SpatialBox& box, std::span<const double> time_points, double tau,
                                               Execution exec = Execution::parallel);

// n evenly spaced interior times of (t0, T): t0 + (T - t0) i / (n + 1).
std::vector<double> interior_times(double t0, double T, std::size_t n);

}  // namespace dualbound
