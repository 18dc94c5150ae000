#pragma once

// Small fixed-capacity vectors and matrices for state, control and noise
// quantities. Everything in this library lives in dimension <= kMaxDim, so
// these never touch the heap inside the simulation loops.

#include <boost/container/static_vector.hpp>

#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace dualbound {

inline constexpr std::size_t kMaxDim = 4;

using Vec = boost::container::static_vector<double, kMaxDim>;

// Row-major dense matrix of shape rows x cols.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    boost::container::static_vector<double, kMaxDim * kMaxDim> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Mat scalar(double v) { return Mat(1, 1, v); }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const Mat& m) {
    for (double x : m.data)
        if (!std::isfinite(x)) return false;
    return true;
}

// Tr[sigma sigma^T Z] for sigma (d x m) and Z (d x d).
inline double diffusion_trace(const Mat& sigma, const Mat& Z) {
    double tr = 0.0;
    for (std::size_t i = 0; i < sigma.rows; ++i)
        for (std::size_t j = 0; j < sigma.rows; ++j) {
            double a = 0.0;
            for (std::size_t k = 0; k < sigma.cols; ++k) a += sigma(i, k) * sigma(j, k);
            tr += a * Z(j, i);
        }
    return tr;
}

// x + b dt + sigma dW, the Euler-Maruyama increment. Shared by every
// integrator so that the primal, the penalty and the pathwise solvers
// produce bit-identical transitions.
template <class Noise>
inline Vec euler_step(const Vec& x, const Vec& b, const Mat& sigma, const Noise& dW, double dt) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double diff = 0.0;
        for (std::size_t k = 0; k < sigma.cols; ++k) diff += sigma(i, k) * dW[k];
        out[i] = x[i] + b[i] * dt + diff;
    }
    return out;
}

}  // namespace dualbound
