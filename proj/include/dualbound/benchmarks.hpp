#pragma once

// Benchmark control problems with independently derived value functions.
//
//   b1-brownian-quadratic  dX = dW, g = x^2                    V = x^2 + T - t
//   b2-lq-drift            dX = u dt + s0 dW, LQ rewards        V = -P(t) x^2 - k(t)
//   b3-lq-diffusion        dX = u dt + beta u dW, LQ rewards    V = -P(t) x^2
//   b4-merton              dX = u mu X dt + u sbar X dW, CRRA   V = exp(lambda (T-t)) x^g / g
//
// The LQ oracles come from substituting V = -P x^2 - k into the HJB
// equation, which gives
//   P' = -q + P^2 / (r + beta^2 P),  P(T) = m
//   k' = -s0^2 P,                    k(T) = 0
// integrated backward with classical RK4.

#include "dualbound/dual.hpp"
#include "dualbound/model.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dualbound {

struct BenchmarkProblem {
    explicit BenchmarkProblem(ControlProblem p) : problem(std::move(p)) {}

    ControlProblem problem;
    std::optional<TestFunction> oracle;
    std::optional<Policy> oracle_policy;
    std::string provenance;
    double oracle_tolerance = 1e-6;  // HJB residual gate for the oracle
    SpatialBox residual_box;
    SpatialBox dual_box;
    Vec x0;
    // Direction of the (1 + s) V scaling that keeps every supremum in the
    // dual bounds away from the box boundary; 0 when no such direction exists.
    int perturbation_sign = 0;
};

struct LqParameters {
    double q = 1.0;
    double r_ctrl = 1.0;
    double m_term = 1.0;
    double sigma0 = 1.0;
    double beta = 0.0;
    double t0 = 0.0;
    double T = 1.0;
    double control_bound = 10.0;
    std::size_t control_points = 41;
};

/// Backward RK4 solution of the scalar Riccati pair (P, k) with C^1 cubic
/// Hermite interpolation between nodes.
class RiccatiCurve {
public:
    RiccatiCurve(const LqParameters& params, double max_step);

    [[nodiscard]] double P(double t) const { return eval(p_, dp_, t, false); }
    [[nodiscard]] double dP(double t) const { return eval(p_, dp_, t, true); }
    [[nodiscard]] double k(double t) const { return eval(k_, dk_, t, false); }
    [[nodiscard]] double dk(double t) const { return eval(k_, dk_, t, true); }
    [[nodiscard]] std::size_t steps() const { return p_.size() - 1; }
    [[nodiscard]] double step() const { return h_; }

private:
    [[nodiscard]] double eval(const std::vector<double>& y, const std::vector<double>& dy, double t,
                              bool derivative) const;

    double t0_;
    double h_;
    std::vector<double> p_, dp_, k_, dk_;  // indexed by time node, ascending
};

ControlProblem lq_problem(const LqParameters& params, std::string id);
BenchmarkProblem riccati_oracle(const LqParameters& params, std::string id = "lq", double max_step = 1e-4);

struct MertonParameters {
    double mu = 0.2;
    double sigma = 0.5;
    double gamma = 0.5;
    double T = 1.0;
    double u_max = 4.0;
    std::size_t control_points = 81;
};

double merton_optimal_fraction(const MertonParameters& params);
double merton_lambda(const MertonParameters& params);
BenchmarkProblem merton_oracle(const MertonParameters& params, std::string id = "merton");

BenchmarkProblem brownian_quadratic(double T = 1.0, std::string id = "b1-brownian-quadratic");

// Registry of the default parameter sets.
std::vector<std::string> benchmark_ids();
BenchmarkProblem make_benchmark(std::string_view id);  // throws UnknownProblem

// (1 + scale) V + drift (T - t) + shift for the benchmark oracle V.
TestFunction perturbed_oracle(const BenchmarkProblem& bench, double scale, double drift, double shift);

// Parametric test-function families:
//   b1-quadratic   t1 x^2 + t2 (T - t) + t3
//   quadratic      t1 x^2 + t2 (T - t) x^2 + t3 (T - t) + t4
//   oracle-affine  (1 + t1) V + t2 (T - t) + t3
std::vector<std::string> family_ids();
ParametricFamily make_family(std::string_view id, const BenchmarkProblem& bench);  // throws UnknownFamily

}  // namespace dualbound
