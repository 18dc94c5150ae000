#pragma once

#include "dualbound/estimate.hpp"
#include "dualbound/model.hpp"
#include "dualbound/parallel.hpp"
#include "dualbound/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dualbound {

/// Box standing in for R^d in the pointwise supremum, with grid resolution
/// and the number of golden-section refinement passes around the best node.
struct SpatialBox {
    Vec lower;
    Vec upper;
    std::vector<std::size_t> points;
    int refinement_levels = 0;

    void check(std::size_t state_dim) const;
};

struct SpatialSup {
    double value = 0.0;
    Vec argmax;
    // The best grid value sits on the box boundary, strictly above every
    // interior node (beyond rounding slack).
    bool on_boundary = false;
};

// sup of f over the box grid, then golden-section refinement. The refined
// value never decreases the grid maximum.
SpatialSup maximize_over_box(const std::function<double(const Vec&)>& f, const SpatialBox& box);

// sup_y [dt h(t, y) + H(t, y, dx h, dxx h)] over the box.
SpatialSup pointwise_hjb_sup(const ControlProblem& problem, const TestFunction& h, double t, const SpatialBox& box);

// sup_y [g(y) - h.value(T, y)] over the box; h.offset is left out.
SpatialSup terminal_gap_sup(const ControlProblem& problem, const TestFunction& h, const SpatialBox& box);

/// Pointwise dual bound
///   h(t,x) + sum_k dt sup_y [dt h + H](t_k, y) + sup_y [g - h(T, .)]
/// with left-rectangle quadrature on `grid` (t = grid.start). The terminal
/// term is always included; it vanishes when h(T, .) = g. h.offset cancels
/// between the first and last terms and is dropped from both.
BoundEstimate dual_v2(const ControlProblem& problem, const TestFunction& h, const Vec& x, const SpatialBox& box,
                      const TimeGrid& grid, Execution exec = Execution::parallel);

// ---------------------------------------------------------------------------
// Pathwise bound
// ---------------------------------------------------------------------------

/// Discretisation of the per-path anticipative control problem.
struct PathwiseDPConfig {
    Vec lower;
    Vec upper;
    std::vector<std::size_t> state_points;
    // Control grid resolution per axis; empty means the problem's own grid.
    std::vector<std::size_t> control_points;

    void check(std::size_t state_dim, std::size_t control_dim) const;
};

/// Tensor state grid with multilinear interpolation (clamped to the box).
class StateGrid {
public:
    explicit StateGrid(const PathwiseDPConfig& cfg);

    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] std::size_t dim() const { return lower_.size(); }
    [[nodiscard]] const Vec& node(std::size_t j) const { return nodes_[j]; }

    // Clamps y into the box; returns true if any coordinate moved.
    bool clamp(Vec& y) const;
    [[nodiscard]] double interpolate(std::span<const double> values, const Vec& y) const;

    // One-dimensional interpolation on an already clamped coordinate.
    [[nodiscard]] double interpolate_1d(std::span<const double> values, double y) const {
        const double s = (y - lower_[0]) * inv_spacing_[0];
        std::size_t i = s > 0.0 ? static_cast<std::size_t>(s) : 0;
        if (i > points_[0] - 2) i = points_[0] - 2;
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
    [[nodiscard]] double lower_1d() const { return lower_[0]; }
    [[nodiscard]] double upper_1d() const { return upper_[0]; }

private:
    Vec lower_;
    Vec upper_;
    Vec spacing_;
    Vec inv_spacing_;
    std::vector<std::size_t> points_;
    std::vector<std::size_t> strides_;
    std::vector<Vec> nodes_;
};

struct PathwiseResult {
    double value = 0.0;  // add h.value(t, x) for the bound itself
    std::size_t transitions = 0;
    std::size_t clamped = 0;

    [[nodiscard]] double clamp_fraction() const {
        return transitions == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(transitions);
    }
};

/// Freezes the Brownian increments of `path` and solves
///   value_N(y) = g(y) - h.value(T, y)
///   value_k(y) = max_u [(dt h + Hcv)(t_k, y, u) dt + value_{k+1}(y + b dt + sigma dW_k)]
/// by backward induction on the state grid. The controls are the control
/// grid plus, when the problem has one, the clamped analytic argmax. The
/// first step is evaluated at x itself rather than interpolated.
///
/// Straightforward single-path implementation; dual_v1 uses a batched
/// engine that reproduces it bit for bit.
PathwiseResult pathwise_inner_max(const ControlProblem& problem, const TestFunction& h, const BrownianPath& path,
                                  const Vec& x, const PathwiseDPConfig& cfg);

// h.value(t,x) + mean over paths of pathwise_inner_max; path i is stream i
// of seed. As in dual_v2, h.offset cancels and is dropped.
BoundEstimate dual_v1(const ControlProblem& problem, const TestFunction& h, const Vec& x, std::size_t n_paths,
                      const TimeGrid& grid, const PathwiseDPConfig& cfg, std::uint64_t seed,
                      Execution exec = Execution::parallel);

// dual_v1 estimate from already computed per-path values.
BoundEstimate summarize_pathwise(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                 const TimeGrid& grid, const PathwiseDPConfig& cfg, std::uint64_t seed,
                                 std::span<const PathwiseResult> per_path);

// Per-path pathwise values (h-relative), as used by dual_v1.
std::vector<PathwiseResult> pathwise_values(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                            std::size_t n_paths, const TimeGrid& grid, const PathwiseDPConfig& cfg,
                                            std::uint64_t seed, Execution exec = Execution::parallel);

// ---------------------------------------------------------------------------
// Degeneracy diagnostic
// ---------------------------------------------------------------------------

struct DegeneracyReport {
    double pointwise = 0.0;          // h-relative pointwise bound (dual_v2 - h.value(t,x))
    std::vector<double> pathwise;    // h-relative per-path inner maxima
    std::vector<double> gap;         // pointwise - pathwise, per path
    double mean_gap = 0.0;
    double gap_std_error = 0.0;
    double min_gap = 0.0;
    double max_gap = 0.0;
    double median_gap = 0.0;
    double fraction_degenerate = 0.0;  // share of paths with |gap| <= tolerance
    double tolerance = 0.0;
    BoundEstimate v1;
    BoundEstimate v2;
};

// Per-path comparison of the pathwise inner maximum against the pointwise
// bound. A gap near zero on every path means the pathwise bound has
// collapsed onto the pointwise one.
DegeneracyReport degeneracy_diagnostic(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                       std::size_t n_paths, const TimeGrid& grid, const PathwiseDPConfig& cfg,
                                       const SpatialBox& box, std::uint64_t seed, double tolerance = 1e-8,
                                       Execution exec = Execution::parallel);

}  // namespace dualbound
