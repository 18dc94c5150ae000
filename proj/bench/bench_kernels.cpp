// Serial reference vs OpenMP kernels on the LQ benchmark.
#include "dualbound/benchmarks.hpp"
#include "dualbound/hjb.hpp"
#include "dualbound/primal.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace dualbound;

namespace {

double seconds(const std::function<double()>& fn, double& value) {
    const auto start = std::chrono::steady_clock::now();
    value = fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void compare(const char* name, const std::function<double(Execution)>& kernel) {
    double vs = 0.0, vp = 0.0;
    const double ts = seconds([&] { return kernel(Execution::serial); }, vs);
    const double tp = seconds([&] { return kernel(Execution::parallel); }, vp);
    std::printf("%-14s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical %s\n", name, ts, tp, ts / tp,
                vs == vp ? "yes" : "NO");
}

}  // namespace

int main() {
    const int workers = configure_workers_from_env();
    std::printf("workers: %d\n", workers);

    const BenchmarkProblem b = make_benchmark("b2-lq-drift");
    const TestFunction h = perturbed_oracle(b, -0.1, 0.2, 0.1);
    const TimeGrid grid{0.0, b.problem.T, 100};
    const PathwiseDPConfig dp{b.dual_box.lower, b.dual_box.upper, {101}, {11}};

    compare("primal", [&](Execution e) {
        return primal_bound(b.problem, *b.oracle_policy, b.x0, 20000, grid, 1, e).value;
    });
    compare("penalty", [&](Execution e) {
        return penalty_mean_test(b.problem, *b.oracle_policy, h, b.x0, 20000, grid, 1, e).mean;
    });
    compare("dual_v1", [&](Execution e) { return dual_v1(b.problem, h, b.x0, 500, grid, dp, 1, e).value; });
    compare("dual_v2", [&](Execution e) { return dual_v2(b.problem, h, b.x0, b.dual_box, grid, e).value; });
    compare("hjb_residual", [&](Execution e) {
        const auto times = interior_times(0.0, 1.0, 20);
        return hjb_residual(b.problem, h, times, b.residual_box, 1e-6, e).residual.max;
    });
    return 0;
}
