#pragma once

#include "dualbound/errors.hpp"
#include "dualbound/linalg.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dualbound {

using DriftFn = std::function<Vec(double t, const Vec& x, const Vec& u)>;
using DiffusionFn = std::function<Mat(double t, const Vec& x, const Vec& u)>;
using RunningRewardFn = std::function<double(double t, const Vec& x, const Vec& u)>;
using TerminalRewardFn = std::function<double(const Vec& x)>;

// Closed-form maximiser of the current-value Hamiltonian at (t, x, p, Z).
using ArgmaxHook = std::function<Vec(double t, const Vec& x, const Vec& p, const Mat& Z)>;

/// Compact control box [lower, upper] with a uniform evaluation grid.
///
/// The grid is enumerated once at construction in lexicographic order
/// (first axis slowest), which is also the tie-breaking order used by every
/// maximisation over controls.
class ControlBox {
public:
    ControlBox(Vec lower, Vec upper, std::vector<std::size_t> points, ArgmaxHook argmax = {});

    [[nodiscard]] std::size_t dim() const { return lower_.size(); }
    [[nodiscard]] const Vec& lower() const { return lower_; }
    [[nodiscard]] const Vec& upper() const { return upper_; }
    [[nodiscard]] const std::vector<std::size_t>& points() const { return points_; }
    [[nodiscard]] const std::vector<Vec>& grid() const { return grid_; }
    [[nodiscard]] const std::vector<Vec>& corners() const { return corners_; }
    [[nodiscard]] const ArgmaxHook& argmax() const { return argmax_; }
    [[nodiscard]] bool has_argmax() const { return static_cast<bool>(argmax_); }

    [[nodiscard]] Vec clamp(const Vec& u) const;
    [[nodiscard]] bool contains(const Vec& u) const;

    // Same box and hook, different grid resolution per axis.
    [[nodiscard]] ControlBox with_points(std::vector<std::size_t> points) const;

private:
    Vec lower_;
    Vec upper_;
    std::vector<std::size_t> points_;
    ArgmaxHook argmax_;
    std::vector<Vec> grid_;
    std::vector<Vec> corners_;
};

// Lexicographically ordered tensor grid (first axis slowest).
std::vector<Vec> tensor_grid(const Vec& lower, const Vec& upper, const std::vector<std::size_t>& points);

struct ControlProblem {
    std::string id;
    std::size_t state_dim = 1;
    std::size_t noise_dim = 1;
    double t0 = 0.0;
    double T = 1.0;
    DriftFn drift;
    DiffusionFn diffusion;
    RunningRewardFn running_reward;
    TerminalRewardFn terminal_reward;
    ControlBox controls;

    [[nodiscard]] std::size_t control_dim() const { return controls.dim(); }

    // Structural invariants (dimensions, t0 < T, all callables present).
    // Throws Error(InvalidArgument).
    void check() const;
};

struct Jet {
    double value = 0.0;
    double dt = 0.0;
    Vec dx;
    Mat dxx;
};

/// Candidate dual function h(t, x) = value(t, x) + offset with
/// user-supplied derivatives of `value`.
struct TestFunction {
    std::string id;
    std::function<double(double, const Vec&)> value;
    std::function<double(double, const Vec&)> dt;
    std::function<Vec(double, const Vec&)> dx;
    std::function<Mat(double, const Vec&)> dxx;
    // h(T, .) == g; otherwise the terminal-gap variant of the bounds applies.
    bool terminal_matches_g = false;
    // Constant part of h, kept apart so that it cancels exactly between
    // h(t, x) and the terminal gap in the dual bounds.
    double offset = 0.0;

    [[nodiscard]] double operator()(double t, const Vec& x) const { return value(t, x) + offset; }
    [[nodiscard]] Jet jet(double t, const Vec& x) const {
        return {value(t, x) + offset, dt(t, x), dx(t, x), dxx(t, x)};
    }

    // h + c. The result never claims terminal matching for c != 0.
    [[nodiscard]] TestFunction shifted(double c) const;
};

/// Markov feedback policy; outputs are clamped into the control box.
class Policy {
public:
    Policy(std::string label, std::function<Vec(double, const Vec&)> feedback, const ControlBox& box);

    [[nodiscard]] Vec operator()(double t, const Vec& x) const { return clamp(feedback_(t, x)); }
    [[nodiscard]] const std::string& label() const { return label_; }

    static Policy constant(const ControlBox& box, Vec u);

private:
    [[nodiscard]] Vec clamp(const Vec& u) const;

    std::string label_;
    std::function<Vec(double, const Vec&)> feedback_;
    Vec lower_;
    Vec upper_;
};

struct ParametricFamily {
    std::string id;
    std::size_t dim = 0;
    std::function<TestFunction(std::span<const double>)> build;
    std::vector<double> initial;
    std::vector<double> scale;
};

// ---------------------------------------------------------------------------
// Problem validation
// ---------------------------------------------------------------------------

struct Probe {
    double t = 0.0;
    Vec x;
    Vec u;
};

struct ProbeResult {
    Probe probe;
    Vec drift;
    Mat diffusion;
    double running_reward = 0.0;
    bool passed = true;
    std::optional<ErrorCode> failure;
    std::string detail;
};

struct ValidationReport {
    std::vector<ProbeResult> probes;

    [[nodiscard]] bool ok() const;
};

// Evaluates b, sigma, l at each probe and records shape/finiteness failures.
ValidationReport inspect_problem(const ControlProblem& problem, std::span<const Probe> probes);

// Same as inspect_problem but throws the first failure
// (DimensionMismatch or NonFinite).
ValidationReport validate_problem(const ControlProblem& problem, std::span<const Probe> probes);

// ---------------------------------------------------------------------------
// Test-function derivative checks
// ---------------------------------------------------------------------------

inline constexpr double kDerivativeTolerance = 1e-4;
inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kTerminalTolerance = 1e-8;

struct TimeState {
    double t = 0.0;
    Vec x;
};

struct DerivativeCheckPoint {
    TimeState at;
    double dt_error = 0.0;
    double dx_error = 0.0;
    double dxx_error = 0.0;
    double symmetry_error = 0.0;
    std::optional<double> terminal_error;
};

struct DerivativeCheckReport {
    std::vector<DerivativeCheckPoint> points;
    double max_error = 0.0;
    bool ok = true;
    std::string detail;
};

// Compares dt/dx/dxx against central differences (dx against h, dxx against
// dx) and h(T, .) against g when terminal matching is claimed. Relative
// errors are scaled by max(1, |reference|).
DerivativeCheckReport inspect_test_function(const TestFunction& h, const ControlProblem& problem,
                                            std::span<const TimeState> points);

// Throws Error(DerivativeMismatch) when inspect_test_function fails.
DerivativeCheckReport check_test_function(const TestFunction& h, const ControlProblem& problem,
                                          std::span<const TimeState> points);

}  // namespace dualbound
