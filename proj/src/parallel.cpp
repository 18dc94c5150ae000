#include "dualbound/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace dualbound {

int configure_workers_from_env() {
    if (const char* raw = std::getenv(kWorkerEnvVar)) {
        try {
            const int n = std::stoi(raw);
            if (n > 0) omp_set_num_threads(n);
        } catch (const std::exception&) {
            // ignored: fall back to the OpenMP default
        }
    }
    return worker_count();
}

int worker_count() { return omp_get_max_threads(); }

MeanEstimate summarize(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n == 0) return {};
    if (std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples[0]; }))
        return {samples[0], 0.0};
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace dualbound
