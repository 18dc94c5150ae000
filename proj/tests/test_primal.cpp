#include "support.hpp"

#include "dualbound/benchmarks.hpp"
#include "dualbound/primal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dualbound;

namespace {

double variance(const std::vector<double>& v) {
    const MeanEstimate m = summarize(v);
    return m.std_error * m.std_error * static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("primal") {

TEST_CASE("deterministic degenerate problem gives the exact value") {
    const ControlProblem p = testing::constant_problem(0.0, 0.0, 0.0, 1.0);
    const BoundEstimate e = primal_bound(p, Policy::constant(p.controls, {0.0}), {1.0}, 500, {0.0, 1.0, 10}, 3);
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.kind == EstimateKind::primal);
    CHECK(e.n_paths == 500);
    CHECK(e.n_steps == 10);
    CHECK(e.dt == 0.1);
    CHECK(e.seed == 3);
    CHECK(e.problem_id == "constant");
}

TEST_CASE("Brownian second moment") {
    const BenchmarkProblem b = make_benchmark("b1-brownian-quadratic");
    const BoundEstimate e = primal_bound(b.problem, *b.oracle_policy, {1.0}, 100000, {0.0, 1.0, 10}, 17);
    CHECK(e.std_error > 0.0);
    CHECK(std::abs(e.value - 2.0) <= 3.0 * e.std_error);
    CHECK(e.source_id == b.oracle_policy->label());
}

TEST_CASE("Riccati feedback on the controlled-diffusion benchmark matches the oracle") {
    const BenchmarkProblem b = make_benchmark("b3-lq-diffusion");
    const double v = b.oracle->value(0.0, {1.0});
    const BoundEstimate e = primal_bound(b.problem, *b.oracle_policy, {1.0}, 100000, {0.0, 1.0, 1000}, 23);
    CHECK(std::abs(e.value - v) <= std::max(3.0 * e.std_error, 0.01 * std::abs(v)));
}

TEST_CASE("primal estimates are deterministic in the seed") {
    const BenchmarkProblem b = make_benchmark("b2-lq-drift");
    const TimeGrid g{0.0, 1.0, 50};
    const BoundEstimate a = primal_bound(b.problem, *b.oracle_policy, {1.0}, 2000, g, 5);
    const BoundEstimate c = primal_bound(b.problem, *b.oracle_policy, {1.0}, 2000, g, 5);
    const BoundEstimate d = primal_bound(b.problem, *b.oracle_policy, {1.0}, 2000, g, 6);
    CHECK(a.value == c.value);
    CHECK(a.std_error == c.std_error);
    CHECK(a.value != d.value);
}

TEST_CASE("primal starts at the grid start") {
    const BenchmarkProblem b = make_benchmark("b1-brownian-quadratic");
    const BoundEstimate e = primal_bound(b.problem, *b.oracle_policy, {0.0}, 20000, {0.5, 1.0, 10}, 1);
    CHECK(e.t == 0.5);
    CHECK(std::abs(e.value - 0.5) <= 3.0 * e.std_error);
}

TEST_CASE("common random numbers reduce the variance of policy differences") {
    const BenchmarkProblem b = make_benchmark("b2-lq-drift");
    const TimeGrid g{0.0, 1.0, 50};
    const Policy lazy("half-riccati", [](double, const Vec& x) { return Vec{-0.5 * x[0]}; }, b.problem.controls);
    const std::size_t n = 4000;
    const auto a = primal_samples(b.problem, *b.oracle_policy, {1.0}, n, g, 7);
    const auto same = primal_samples(b.problem, lazy, {1.0}, n, g, 7);
    const auto other = primal_samples(b.problem, lazy, {1.0}, n, g, 8);
    std::vector<double> paired(n), independent(n);
    for (std::size_t i = 0; i < n; ++i) {
        paired[i] = a[i] - same[i];
        independent[i] = a[i] - other[i];
    }
    CHECK(variance(paired) < variance(independent));
}

TEST_CASE("primal_bound needs two paths") {
    const BenchmarkProblem b = make_benchmark("b1-brownian-quadratic");
    CHECK_THROWS_AS(primal_bound(b.problem, *b.oracle_policy, {1.0}, 1, {0.0, 1.0, 10}, 1), Error);
}

}  // TEST_SUITE
