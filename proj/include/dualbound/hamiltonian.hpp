#pragma once

#include "dualbound/model.hpp"

namespace dualbound {

struct HamiltonianQuery {
    double t = 0.0;
    Vec x;
    Vec p;  // gradient of h in x
    Mat Z;  // Hessian of h in x
};

// b(t,x,u).p + 1/2 Tr[sigma sigma^T(t,x,u) Z] + l(t,x,u).
double hcv(const ControlProblem& problem, const HamiltonianQuery& query, const Vec& u);

struct HamiltonianValue {
    double value = 0.0;
    Vec argmax;
};

/// sup over controls of hcv.
///
/// With an analytic argmax hook the candidates are the (clamped) hook output
/// and the box corners; otherwise the whole control grid is scanned. Ties go
/// to the lexicographically smallest control.
HamiltonianValue hamiltonian_sup(const ControlProblem& problem, const HamiltonianQuery& query);

// Candidate controls used by hamiltonian_sup, in tie-breaking order.
std::vector<Vec> hamiltonian_candidates(const ControlBox& box, const HamiltonianQuery& query);

}  // namespace dualbound
