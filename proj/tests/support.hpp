#pragma once

#include "dualbound/model.hpp"

#include <cmath>
#include <limits>

namespace testing {

using dualbound::ControlBox;
using dualbound::ControlProblem;
using dualbound::Mat;
using dualbound::TestFunction;
using dualbound::Vec;

// Scalar problem with constant drift/diffusion/reward.
inline ControlProblem constant_problem(double b, double sigma, double l, double g_coeff = 0.0) {
    return ControlProblem{
        .id = "constant",
        .state_dim = 1,
        .noise_dim = 1,
        .t0 = 0.0,
        .T = 1.0,
        .drift = [b](double, const Vec&, const Vec&) { return Vec{b}; },
        .diffusion = [sigma](double, const Vec&, const Vec&) { return Mat::scalar(sigma); },
        .running_reward = [l](double, const Vec&, const Vec&) { return l; },
        .terminal_reward = [g_coeff](const Vec& x) { return g_coeff * x[0] * x[0]; },
        .controls = ControlBox({0.0}, {0.0}, {1}),
    };
}

// dX = u dt + sigma dW, l = -(q x^2 + r u^2) on U = [lo, hi] (no hook).
inline ControlProblem drift_control(double sigma, double lo, double hi, std::size_t points, double q = 1.0,
                                    double r = 1.0) {
    return ControlProblem{
        .id = "drift-control",
        .state_dim = 1,
        .noise_dim = 1,
        .t0 = 0.0,
        .T = 1.0,
        .drift = [](double, const Vec&, const Vec& u) { return Vec{u[0]}; },
        .diffusion = [sigma](double, const Vec&, const Vec&) { return Mat::scalar(sigma); },
        .running_reward = [q, r](double, const Vec& x, const Vec& u) { return -(q * x[0] * x[0] + r * u[0] * u[0]); },
        .terminal_reward = [](const Vec& x) { return -x[0] * x[0]; },
        .controls = ControlBox({lo}, {hi}, {points}),
    };
}

// h(t, x) = a x^2 + c (T - t) + e with exact derivatives.
inline TestFunction quadratic(double a, double c, double e, double T = 1.0) {
    return TestFunction{
        .id = "quadratic",
        .value = [=](double t, const Vec& x) { return a * x[0] * x[0] + c * (T - t) + e; },
        .dt = [=](double, const Vec&) { return -c; },
        .dx = [=](double, const Vec& x) { return Vec{2 * a * x[0]}; },
        .dxx = [=](double, const Vec&) { return Mat::scalar(2 * a); },
    };
}

inline TestFunction zero_function() { return quadratic(0.0, 0.0, 0.0); }

}  // namespace testing
