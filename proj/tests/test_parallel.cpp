#include "support.hpp"

#include "dualbound/benchmarks.hpp"
#include "dualbound/dual.hpp"
#include "dualbound/hjb.hpp"
#include "dualbound/parallel.hpp"
#include "dualbound/primal.hpp"

#include <doctest.h>

#include <omp.h>

#include <stdexcept>
#include <string>
#include <vector>

using namespace dualbound;

namespace {

// Runs fn under several OpenMP worker counts and restores the original.
template <class Fn>
void for_worker_counts(Fn&& fn) {
    const int original = omp_get_max_threads();
    for (int n : {1, 2, 4, 7}) {
        omp_set_num_threads(n);
        fn(n);
    }
    omp_set_num_threads(original);
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("summarize gives zero error for identical samples") {
    const std::vector<double> same(10, 0.1);
    const MeanEstimate m = summarize(same);
    CHECK(m.mean == 0.1);
    CHECK(m.std_error == 0.0);
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(summarize(v).mean == 2.5);
    CHECK(summarize(v).std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("the lowest failing index is rethrown") {
    for_worker_counts([](int) {
        try {
            for_each_index(200, Execution::parallel, [](std::size_t i) {
                if (i % 37 == 5) throw std::runtime_error(std::to_string(i));
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "5");
        }
    });
}

TEST_CASE("primal and penalty estimates do not depend on the worker count") {
    const BenchmarkProblem b = make_benchmark("b2-lq-drift");
    const TimeGrid g{0.0, 1.0, 40};
    const BoundEstimate ref = primal_bound(b.problem, *b.oracle_policy, {1.0}, 3000, g, 12, Execution::serial);
    const MeanEstimate pref = penalty_mean_test(b.problem, *b.oracle_policy, *b.oracle, {1.0}, 3000, g, 12,
                                                Execution::serial);
    for_worker_counts([&](int n) {
        CAPTURE(n);
        const BoundEstimate e = primal_bound(b.problem, *b.oracle_policy, {1.0}, 3000, g, 12);
        CHECK(e.value == ref.value);
        CHECK(e.std_error == ref.std_error);
        const MeanEstimate m = penalty_mean_test(b.problem, *b.oracle_policy, *b.oracle, {1.0}, 3000, g, 12);
        CHECK(m.mean == pref.mean);
        CHECK(m.std_error == pref.std_error);
    });
}

TEST_CASE("batched pathwise engine reproduces the serial reference") {
    for (const char* id : {"b2-lq-drift", "b3-lq-diffusion", "b4-merton"}) {
        CAPTURE(id);
        const BenchmarkProblem b = make_benchmark(id);
        const TestFunction h = perturbed_oracle(b, 0.05 * b.perturbation_sign, 0.1, 0.0);
        const TimeGrid g{0.0, 1.0, 15};
        const PathwiseDPConfig cfg{b.dual_box.lower, b.dual_box.upper, {61}, {7}};
        const auto ref = pathwise_values(b.problem, h, b.x0, 1100, g, cfg, 4, Execution::serial);
        for_worker_counts([&](int n) {
            CAPTURE(n);
            const auto got = pathwise_values(b.problem, h, b.x0, 1100, g, cfg, 4);
            REQUIRE(got.size() == ref.size());
            bool same = true;
            for (std::size_t i = 0; i < ref.size(); ++i)
                same = same && got[i].value == ref[i].value && got[i].clamped == ref[i].clamped &&
                       got[i].transitions == ref[i].transitions;
            CHECK(same);
        });
    }
}

TEST_CASE("two-dimensional pathwise engine reproduces the serial reference") {
    const ControlProblem p{
        .id = "plane",
        .state_dim = 2,
        .noise_dim = 2,
        .t0 = 0.0,
        .T = 1.0,
        .drift = [](double, const Vec&, const Vec& u) { return Vec{u[0], -u[0]}; },
        .diffusion =
            [](double, const Vec&, const Vec&) {
                Mat s(2, 2, 0.0);
                s(0, 0) = 0.5;
                s(1, 1) = 0.3;
                s(1, 0) = 0.1;
                return s;
            },
        .running_reward = [](double, const Vec& x, const Vec& u) { return -(x[0] * x[0] + x[1] * x[1] + u[0] * u[0]); },
        .terminal_reward = [](const Vec& x) { return -x[0] * x[0]; },
        .controls = ControlBox({-1.0}, {1.0}, {5}),
    };
    const TestFunction h{
        .id = "bowl",
        .value = [](double t, const Vec& x) { return -0.5 * (x[0] * x[0] + x[1] * x[1]) + (1.0 - t); },
        .dt = [](double, const Vec&) { return -1.0; },
        .dx = [](double, const Vec& x) { return Vec{-x[0], -x[1]}; },
        .dxx =
            [](double, const Vec&) {
                Mat m(2, 2, 0.0);
                m(0, 0) = m(1, 1) = -1.0;
                return m;
            },
    };
    const TimeGrid g{0.0, 1.0, 6};
    const PathwiseDPConfig cfg{{-2.0, -2.0}, {2.0, 2.0}, {11, 11}, {}};
    const auto ref = pathwise_values(p, h, {0.5, -0.25}, 50, g, cfg, 3, Execution::serial);
    const auto got = pathwise_values(p, h, {0.5, -0.25}, 50, g, cfg, 3, Execution::parallel);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got[i].value == ref[i].value);
}

TEST_CASE("pointwise bound, residual and degeneracy do not depend on execution mode") {
    const BenchmarkProblem b = make_benchmark("b3-lq-diffusion");
    const TestFunction h = perturbed_oracle(b, -0.1, 0.05, 0.0);
    const TimeGrid g{0.0, 1.0, 30};
    const double v2 = dual_v2(b.problem, h, {1.0}, b.dual_box, g, Execution::serial).value;
    const auto times = interior_times(0.0, 1.0, 5);
    const HJBReport r = hjb_residual(b.problem, h, times, b.residual_box, 1e-5, Execution::serial);
    const PathwiseDPConfig cfg{{-5.0}, {5.0}, {51}, {5}};
    const DegeneracyReport d = degeneracy_diagnostic(b.problem, h, {1.0}, 64, g, cfg, b.dual_box, 2, 1e-8,
                                                     Execution::serial);
    for_worker_counts([&](int n) {
        CAPTURE(n);
        CHECK(dual_v2(b.problem, h, {1.0}, b.dual_box, g).value == v2);
        const HJBReport rp = hjb_residual(b.problem, h, times, b.residual_box, 1e-5);
        CHECK(rp.residual.mean == r.residual.mean);
        CHECK(rp.residual.min == r.residual.min);
        CHECK(rp.residual.argmax.x == r.residual.argmax.x);
        const DegeneracyReport dp = degeneracy_diagnostic(b.problem, h, {1.0}, 64, g, cfg, b.dual_box, 2);
        CHECK(dp.gap == d.gap);
        CHECK(dp.mean_gap == d.mean_gap);
    });
}

TEST_CASE("worker configuration from the environment") {
    CHECK(worker_count() >= 1);
    CHECK(configure_workers_from_env() >= 1);
}

}  // TEST_SUITE
