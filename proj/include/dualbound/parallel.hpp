#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace dualbound {

// Every Monte-Carlo kernel has a plain serial reference and an OpenMP
// variant. Both produce bit-identical results: per-path values are written
// to a buffer indexed by path and reduced in ascending path order.
enum class Execution { serial, parallel };

inline constexpr const char* kWorkerEnvVar = "DUALBOUND_WORKERS";

// Reads DUALBOUND_WORKERS (if set and positive) and applies it to OpenMP.
// Returns the resulting worker count.
int configure_workers_from_env();
int worker_count();

// Runs fn(i) for i in [0, n). Under Execution::parallel the iterations are
// spread over OpenMP workers; if any iteration throws, the exception from the
// lowest index is rethrown so error reports do not depend on scheduling.
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> failures(n);
    bool any = false;
#pragma omp parallel for schedule(dynamic, 16) reduction(|| : any)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            failures[i] = std::current_exception();
            any = true;
        }
    }
    if (any)
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Sample mean and standard error (sample sd / sqrt(n)) accumulated in index
// order; std_error is exactly 0 when all samples are equal.
MeanEstimate summarize(std::span<const double> samples);

}  // namespace dualbound
