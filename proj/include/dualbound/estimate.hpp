#pragma once

#include "dualbound/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace dualbound {

enum class EstimateKind { primal, dual_v1, dual_v2, oracle };

std::string_view kind_name(EstimateKind kind);

/// A bound on V(t, x) with its Monte-Carlo error and discretisation metadata.
struct BoundEstimate {
    EstimateKind kind = EstimateKind::primal;
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic kinds
    std::size_t n_paths = 0;
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::string problem_id;
    std::string source_id;  // policy label or test-function id
    double t = 0.0;
    Vec x;

    // Dual metadata. A bound whose spatial supremum sits on the search box
    // boundary is not certified: the supremum over R^d may be larger.
    bool boundary_attained = false;
    double clamp_fraction = 0.0;  // pathwise DP transitions clamped to the state box
    double terminal_gap = 0.0;    // sup_y [g(y) - h(T, y)] (or its path mean for dual_v1)

    [[nodiscard]] bool trusted() const { return !boundary_attained; }
};

}  // namespace dualbound
