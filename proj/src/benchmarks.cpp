#include "dualbound/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dualbound {

namespace {

SpatialBox box1(double lo, double hi, std::size_t points, int refine) { return {{lo}, {hi}, {points}, refine}; }

std::string join_params(std::span<const double> theta) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? "," : "") << theta[i];
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Riccati
// ---------------------------------------------------------------------------

RiccatiCurve::RiccatiCurve(const LqParameters& prm, double max_step) : t0_(prm.t0) {
    if (!(prm.q >= 0 && prm.r_ctrl > 0 && prm.m_term > 0))
        throw Error(ErrorCode::ParameterDomain, "Riccati oracle needs q >= 0 and r_ctrl, m_term > 0");
    if (!(prm.t0 < prm.T)) throw Error(ErrorCode::ParameterDomain, "Riccati oracle needs t0 < T");
    if (!(max_step > 0)) throw Error(ErrorCode::InvalidArgument, "Riccati step must be positive");

    const std::size_t n = static_cast<std::size_t>(std::ceil((prm.T - prm.t0) / max_step));
    h_ = (prm.T - prm.t0) / static_cast<double>(n);

    const double b2 = prm.beta * prm.beta;
    const double s2 = prm.sigma0 * prm.sigma0;
    // Right-hand side in reversed time s = T - t.
    auto rhs = [&](double P, double& dPds, double& dkds) {
        const double denom = prm.r_ctrl + b2 * P;
        if (!(P > 0.0) || !std::isfinite(P) || !(denom > 0.0))
            throw Error(ErrorCode::RiccatiBlowup, "Riccati solution left (0, inf)");
        dPds = prm.q - P * P / denom;
        dkds = s2 * P;
    };

    std::vector<double> P(n + 1), K(n + 1), dP(n + 1), dK(n + 1);  // indexed by reversed step
    P[0] = prm.m_term;
    K[0] = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        double fP, fk;
        rhs(P[i], fP, fk);
        dP[i] = -fP;  // d/dt = -d/ds
        dK[i] = -fk;
        if (i == n) break;
        double k1P = fP, k1k = fk, k2P, k2k, k3P, k3k, k4P, k4k;
        rhs(P[i] + 0.5 * h_ * k1P, k2P, k2k);
        rhs(P[i] + 0.5 * h_ * k2P, k3P, k3k);
        rhs(P[i] + h_ * k3P, k4P, k4k);
        P[i + 1] = P[i] + h_ / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
        K[i + 1] = K[i] + h_ / 6.0 * (k1k + 2 * k2k + 2 * k3k + k4k);
    }
    p_.assign(P.rbegin(), P.rend());
    dp_.assign(dP.rbegin(), dP.rend());
    k_.assign(K.rbegin(), K.rend());
    dk_.assign(dK.rbegin(), dK.rend());
}

double RiccatiCurve::eval(const std::vector<double>& y, const std::vector<double>& dy, double t,
                          bool derivative) const {
    const std::size_t n = y.size() - 1;
    const double pos = (t - t0_) / h_;
    const std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 1)));
    const double s = pos - static_cast<double>(i);
    const double s2 = s * s, s3 = s2 * s;
    if (!derivative) {
        return (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h_ * dy[i] + (-2 * s3 + 3 * s2) * y[i + 1] +
               (s3 - s2) * h_ * dy[i + 1];
    }
    return ((6 * s2 - 6 * s) * y[i] + (3 * s2 - 4 * s + 1) * h_ * dy[i] + (-6 * s2 + 6 * s) * y[i + 1] +
            (3 * s2 - 2 * s) * h_ * dy[i + 1]) /
           h_;
}

ControlProblem lq_problem(const LqParameters& prm, std::string id) {
    const double s0 = prm.sigma0, beta = prm.beta, q = prm.q, r = prm.r_ctrl, m = prm.m_term;
    // argmax_u of u p + 1/2 (s0 + beta u)^2 Z - r u^2
    ArgmaxHook hook = [s0, beta, r, lo = -prm.control_bound](double, const Vec&, const Vec& p, const Mat& Z) {
        const double denom = 2 * r - beta * beta * Z(0, 0);
        if (!(denom > 0)) return Vec{lo};
        return Vec{(p[0] + beta * s0 * Z(0, 0)) / denom};
    };
    return ControlProblem{
        .id = std::move(id),
        .state_dim = 1,
        .noise_dim = 1,
        .t0 = prm.t0,
        .T = prm.T,
        .drift = [](double, const Vec&, const Vec& u) { return Vec{u[0]}; },
        .diffusion = [s0, beta](double, const Vec&, const Vec& u) { return Mat::scalar(s0 + beta * u[0]); },
        .running_reward = [q, r](double, const Vec& x, const Vec& u) { return -(q * x[0] * x[0] + r * u[0] * u[0]); },
        .terminal_reward = [m](const Vec& x) { return -m * x[0] * x[0]; },
        .controls = ControlBox({-prm.control_bound}, {prm.control_bound}, {prm.control_points}, hook),
    };
}

BenchmarkProblem riccati_oracle(const LqParameters& prm, std::string id, double max_step) {
    if (prm.sigma0 != 0.0 && prm.beta != 0.0)
        throw Error(ErrorCode::ParameterDomain,
                    "quadratic Riccati ansatz needs sigma0 == 0 or beta == 0 (cross term breaks V = -P x^2 - k)");
    auto curve = std::make_shared<const RiccatiCurve>(prm, max_step);
    const double r = prm.r_ctrl, b2 = prm.beta * prm.beta, T = prm.T;

    BenchmarkProblem b(lq_problem(prm, id));
    b.oracle = TestFunction{
        .id = id + ":oracle",
        .value = [curve](double t, const Vec& x) { return -curve->P(t) * x[0] * x[0] - curve->k(t); },
        .dt = [curve](double t, const Vec& x) { return -curve->dP(t) * x[0] * x[0] - curve->dk(t); },
        .dx = [curve](double t, const Vec& x) { return Vec{-2 * curve->P(t) * x[0]}; },
        .dxx = [curve](double t, const Vec&) { return Mat::scalar(-2 * curve->P(t)); },
        .terminal_matches_g = true,
    };
    b.oracle_policy = Policy(
        id + ":riccati-feedback",
        [curve, r, b2](double t, const Vec& x) {
            const double P = curve->P(t);
            return Vec{-P * x[0] / (r + b2 * P)};
        },
        b.problem.controls);
    std::ostringstream note;
    note << "LQ benchmark, Riccati oracle by RK4 (step " << curve->step() << ") on [" << prm.t0 << ", " << T
         << "], cubic Hermite in time";
    b.provenance = note.str();
    b.oracle_tolerance = 1e-5;
    b.residual_box = box1(-3, 3, 61, 0);
    b.dual_box = box1(-5, 5, 401, 2);
    b.x0 = {1.0};
    b.perturbation_sign = -1;
    return b;
}

// ---------------------------------------------------------------------------
// Merton
// ---------------------------------------------------------------------------

double merton_optimal_fraction(const MertonParameters& p) {
    return p.mu / (p.sigma * p.sigma * (1.0 - p.gamma));
}

double merton_lambda(const MertonParameters& p) {
    return p.gamma * p.mu * p.mu / (2.0 * p.sigma * p.sigma * (1.0 - p.gamma));
}

BenchmarkProblem merton_oracle(const MertonParameters& prm, std::string id) {
    if (!(prm.gamma > 0.0 && prm.gamma < 1.0)) throw Error(ErrorCode::ParameterDomain, "Merton needs gamma in (0, 1)");
    if (!(prm.sigma > 0.0)) throw Error(ErrorCode::ParameterDomain, "Merton needs sigma > 0");
    if (!(prm.T > 0.0) || !(prm.u_max > 0.0)) throw Error(ErrorCode::ParameterDomain, "Merton needs T, u_max > 0");
    const double ustar = merton_optimal_fraction(prm);
    if (!(ustar >= 0.0 && ustar <= prm.u_max))
        throw Error(ErrorCode::ParameterDomain, "Merton optimal fraction lies outside [0, u_max]");

    const double mu = prm.mu, sig = prm.sigma, gam = prm.gamma, T = prm.T;
    const double lambda = merton_lambda(prm);
    ArgmaxHook hook = [mu, sig](double, const Vec& x, const Vec& p, const Mat& Z) {
        if (!(x[0] > 0.0) || !(Z(0, 0) < 0.0)) return Vec{0.0};
        return Vec{-mu * p[0] / (sig * sig * x[0] * Z(0, 0))};
    };

    BenchmarkProblem b(ControlProblem{
                           .id = std::move(id),
                           .state_dim = 1,
                           .noise_dim = 1,
                           .t0 = 0.0,
                           .T = T,
                           .drift = [mu](double, const Vec& x, const Vec& u) { return Vec{u[0] * mu * x[0]}; },
                           .diffusion = [sig](double, const Vec& x,
                                              const Vec& u) { return Mat::scalar(u[0] * sig * x[0]); },
                           .running_reward = [](double, const Vec&, const Vec&) { return 0.0; },
                           .terminal_reward = [gam](const Vec& x) { return std::pow(x[0], gam) / gam; },
                           .controls = ControlBox({0.0}, {prm.u_max}, {prm.control_points}, hook),
                       });
    const std::string& pid = b.problem.id;
    b.oracle = TestFunction{
        .id = pid + ":oracle",
        .value = [=](double t, const Vec& x) { return std::exp(lambda * (T - t)) * std::pow(x[0], gam) / gam; },
        .dt = [=](double t, const Vec& x) { return -lambda * std::exp(lambda * (T - t)) * std::pow(x[0], gam) / gam; },
        .dx = [=](double t, const Vec& x) { return Vec{std::exp(lambda * (T - t)) * std::pow(x[0], gam - 1)}; },
        .dxx = [=](double t,
                   const Vec& x) { return Mat::scalar((gam - 1) * std::exp(lambda * (T - t)) * std::pow(x[0], gam - 2)); },
        .terminal_matches_g = true,
    };
    b.oracle_policy = Policy::constant(b.problem.controls, {ustar});
    std::ostringstream note;
    note << "Merton CRRA benchmark, u* = " << ustar << ", lambda = " << lambda;
    b.provenance = note.str();
    b.oracle_tolerance = 1e-6;
    b.residual_box = box1(0.2, 5, 49, 0);
    b.dual_box = box1(0.2, 5, 401, 2);
    b.x0 = {1.0};
    b.perturbation_sign = 0;
    return b;
}

// ---------------------------------------------------------------------------
// Brownian quadratic
// ---------------------------------------------------------------------------

BenchmarkProblem brownian_quadratic(double T, std::string id) {
    BenchmarkProblem b(ControlProblem{
                           .id = std::move(id),
                           .state_dim = 1,
                           .noise_dim = 1,
                           .t0 = 0.0,
                           .T = T,
                           .drift = [](double, const Vec&, const Vec&) { return Vec{0.0}; },
                           .diffusion = [](double, const Vec&, const Vec&) { return Mat::scalar(1.0); },
                           .running_reward = [](double, const Vec&, const Vec&) { return 0.0; },
                           .terminal_reward = [](const Vec& x) { return x[0] * x[0]; },
                           .controls = ControlBox({0.0}, {0.0}, {1}),
                       });
    b.oracle = TestFunction{
        .id = b.problem.id + ":oracle",
        .value = [T](double t, const Vec& x) { return x[0] * x[0] + (T - t); },
        .dt = [](double, const Vec&) { return -1.0; },
        .dx = [](double, const Vec& x) { return Vec{2 * x[0]}; },
        .dxx = [](double, const Vec&) { return Mat::scalar(2.0); },
        .terminal_matches_g = true,
    };
    b.oracle_policy = Policy::constant(b.problem.controls, {0.0});
    b.provenance = "uncontrolled Brownian motion with quadratic terminal reward, V = x^2 + T - t";
    b.oracle_tolerance = 1e-6;
    b.residual_box = box1(-3, 3, 61, 0);
    b.dual_box = box1(-5, 5, 401, 2);
    b.x0 = {1.0};
    b.perturbation_sign = +1;
    return b;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

std::vector<std::string> benchmark_ids() {
    return {"b1-brownian-quadratic", "b2-lq-drift", "b3-lq-diffusion", "b4-merton"};
}

BenchmarkProblem make_benchmark(std::string_view id) {
    if (id == "b1-brownian-quadratic") return brownian_quadratic(1.0, std::string(id));
    if (id == "b2-lq-drift") return riccati_oracle({.sigma0 = 1.0, .beta = 0.0}, std::string(id));
    if (id == "b3-lq-diffusion") return riccati_oracle({.sigma0 = 0.0, .beta = 0.5}, std::string(id));
    if (id == "b4-merton") return merton_oracle({}, std::string(id));
    throw Error(ErrorCode::UnknownProblem, "unknown problem id '" + std::string(id) + "'");
}

TestFunction perturbed_oracle(const BenchmarkProblem& bench, double scale, double drift, double shift) {
    if (!bench.oracle) throw Error(ErrorCode::InvalidArgument, "benchmark has no oracle to perturb");
    const TestFunction& v = *bench.oracle;
    const double T = bench.problem.T;
    const double a = 1.0 + scale;
    std::ostringstream id;
    id.precision(17);
    id << bench.problem.id << ":oracle-affine(" << scale << "," << drift << "," << shift << ")";
    return TestFunction{
        .id = id.str(),
        .value = [=, f = v.value](double t, const Vec& x) { return a * f(t, x) + drift * (T - t) + shift; },
        .dt = [=, f = v.dt](double t, const Vec& x) { return a * f(t, x) - drift; },
        .dx = [=, f = v.dx](double t, const Vec& x) {
            Vec g = f(t, x);
            for (double& c : g) c *= a;
            return g;
        },
        .dxx = [=, f = v.dxx](double t, const Vec& x) {
            Mat z = f(t, x);
            for (double& c : z.data) c *= a;
            return z;
        },
        .terminal_matches_g = v.terminal_matches_g && scale == 0.0 && shift == 0.0,
    };
}

std::vector<std::string> family_ids() { return {"b1-quadratic", "quadratic", "oracle-affine"}; }

ParametricFamily make_family(std::string_view id, const BenchmarkProblem& bench) {
    const double T = bench.problem.T;
    const std::string pid = bench.problem.id;
    if ((id == "b1-quadratic" || id == "quadratic") && bench.problem.state_dim != 1)
        throw Error(ErrorCode::InvalidArgument, "quadratic families are one-dimensional");

    if (id == "b1-quadratic") {
        return ParametricFamily{
            .id = std::string(id),
            .dim = 3,
            .build = [T, pid](std::span<const double> th) {
                const double a = th[0], c = th[1], e = th[2];
                return TestFunction{
                    .id = pid + ":b1-quadratic(" + join_params(th) + ")",
                    .value = [=](double t, const Vec& x) { return a * x[0] * x[0] + c * (T - t) + e; },
                    .dt = [=](double, const Vec&) { return -c; },
                    .dx = [=](double, const Vec& x) { return Vec{2 * a * x[0]}; },
                    .dxx = [=](double, const Vec&) { return Mat::scalar(2 * a); },
                };
            },
            .initial = {1.5, 1.5, 0.5},
            .scale = {0.25, 0.25, 0.25},
        };
    }
    if (id == "quadratic") {
        return ParametricFamily{
            .id = std::string(id),
            .dim = 4,
            .build = [T, pid](std::span<const double> th) {
                const double a = th[0], b = th[1], c = th[2], e = th[3];
                return TestFunction{
                    .id = pid + ":quadratic(" + join_params(th) + ")",
                    .value = [=](double t, const Vec& x) { return (a + b * (T - t)) * x[0] * x[0] + c * (T - t) + e; },
                    .dt = [=](double, const Vec& x) { return -b * x[0] * x[0] - c; },
                    .dx = [=](double t, const Vec& x) { return Vec{2 * (a + b * (T - t)) * x[0]}; },
                    .dxx = [=](double t, const Vec&) { return Mat::scalar(2 * (a + b * (T - t))); },
                };
            },
            .initial = {0.0, 0.0, 0.0, 0.0},
            .scale = {0.5, 0.5, 0.5, 0.5},
        };
    }
    if (id == "oracle-affine") {
        if (!bench.oracle) throw Error(ErrorCode::UnknownFamily, "family 'oracle-affine' needs a benchmark oracle");
        const double sign = bench.perturbation_sign;
        return ParametricFamily{
            .id = std::string(id),
            .dim = 3,
            .build = [bench](std::span<const double> th) { return perturbed_oracle(bench, th[0], th[1], th[2]); },
            .initial = {0.1 * sign, 0.1, 0.1},
            .scale = {0.05, 0.05, 0.05},
        };
    }
    throw Error(ErrorCode::UnknownFamily, "unknown family id '" + std::string(id) + "'");
}

}  // namespace dualbound
