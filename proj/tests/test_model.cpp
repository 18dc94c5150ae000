#include "support.hpp"

#include "dualbound/model.hpp"

#include <doctest.h>

#include <limits>
#include <vector>

using namespace dualbound;

TEST_SUITE("model") {

TEST_CASE("control box grid is lexicographic with the first axis slowest") {
    const ControlBox box({0.0, 10.0}, {1.0, 12.0}, {2, 3});
    REQUIRE(box.grid().size() == 6);
    CHECK(box.grid()[0] == Vec{0.0, 10.0});
    CHECK(box.grid()[1] == Vec{0.0, 11.0});
    CHECK(box.grid()[2] == Vec{0.0, 12.0});
    CHECK(box.grid()[3] == Vec{1.0, 10.0});
    CHECK(box.grid()[5] == Vec{1.0, 12.0});
    CHECK(box.corners().size() == 4);
}

TEST_CASE("control box rejects empty boxes and empty grids") {
    CHECK_THROWS_AS(ControlBox({1.0}, {0.0}, {3}), Error);
    CHECK_THROWS_AS(ControlBox({0.0}, {1.0}, {0}), Error);
    CHECK_THROWS_AS(ControlBox({0.0}, {1.0}, {3, 3}), Error);
}

TEST_CASE("degenerate axes collapse to a single point") {
    const ControlBox box({0.0}, {0.0}, {11});
    CHECK(box.points() == std::vector<std::size_t>{1});
    CHECK(box.grid().size() == 1);
    CHECK(box.with_points({7}).grid().size() == 1);
}

TEST_CASE("clamp is idempotent and lands in the box") {
    const ControlBox box({-1.0, 0.0}, {1.0, 2.0}, {3, 3});
    for (const Vec& u : {Vec{-5.0, 1.0}, Vec{0.5, 9.0}, Vec{3.0, -3.0}, Vec{0.0, 0.0}}) {
        const Vec c = box.clamp(u);
        CHECK(box.contains(c));
        CHECK(box.clamp(c) == c);
    }
}

TEST_CASE("policy output is clamped into the control box") {
    const ControlBox box({-1.0}, {1.0}, {3});
    const Policy p("linear", [](double, const Vec& x) { return Vec{10.0 * x[0]}; }, box);
    CHECK(p(0.0, Vec{0.05})[0] == doctest::Approx(0.5));
    CHECK(p(0.0, Vec{1.0})[0] == 1.0);
    CHECK(p(0.0, Vec{-1.0})[0] == -1.0);
    CHECK(Policy::constant(box, {4.0})(0.3, Vec{0.0})[0] == 1.0);
}

TEST_CASE("validate_problem reports constant coefficients") {
    ControlProblem p = testing::constant_problem(0.0, 0.0, 1.0);
    const std::vector<Probe> probes = {{0.0, {0.0}, {0.0}}};
    const ValidationReport r = validate_problem(p, probes);
    REQUIRE(r.probes.size() == 1);
    CHECK(r.ok());
    CHECK(r.probes[0].drift[0] == 0.0);
    CHECK(r.probes[0].diffusion(0, 0) == 0.0);
    CHECK(r.probes[0].running_reward == 1.0);
}

TEST_CASE("validate_problem flags a drift of the wrong length") {
    ControlProblem p = testing::constant_problem(0.0, 0.0, 1.0);
    p.drift = [](double, const Vec&, const Vec&) { return Vec{0.0, 0.0}; };
    const std::vector<Probe> probes = {{0.0, {0.0}, {0.0}}};
    CHECK_FALSE(inspect_problem(p, probes).ok());
    try {
        validate_problem(p, probes);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("validate_problem flags an infinite reward") {
    ControlProblem p = testing::constant_problem(0.0, 0.0, std::numeric_limits<double>::infinity());
    const std::vector<Probe> probes = {{0.0, {0.0}, {0.0}}};
    try {
        validate_problem(p, probes);
        FAIL("expected NonFinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
}

TEST_CASE("validate_problem requires probes") {
    const ControlProblem p = testing::constant_problem(0.0, 0.0, 1.0);
    CHECK_THROWS_AS(validate_problem(p, std::vector<Probe>{}), Error);
}

TEST_CASE("problem check rejects t0 >= T") {
    ControlProblem p = testing::constant_problem(0.0, 0.0, 1.0);
    p.T = p.t0;
    CHECK_THROWS_AS(p.check(), Error);
}

TEST_CASE("polynomial derivatives pass the finite-difference check") {
    const ControlProblem p = testing::constant_problem(0.0, 1.0, 0.0, 1.0);
    const TestFunction h = testing::quadratic(1.0, 0.0, 0.0);
    const std::vector<TimeState> pts = {{0.5, {1.0}}};
    const DerivativeCheckReport r = check_test_function(h, p, pts);
    CHECK(r.ok);
    CHECK(r.max_error <= 1e-6);
}

TEST_CASE("a planted gradient error is a derivative mismatch") {
    const ControlProblem p = testing::constant_problem(0.0, 1.0, 0.0, 1.0);
    TestFunction h = testing::quadratic(1.0, 0.0, 0.0);
    h.dx = [](double, const Vec& x) { return Vec{3.0 * x[0]}; };
    const std::vector<TimeState> pts = {{0.5, {1.0}}};
    CHECK_FALSE(inspect_test_function(h, p, pts).ok);
    try {
        check_test_function(h, p, pts);
        FAIL("expected DerivativeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DerivativeMismatch);
    }
}

TEST_CASE("an asymmetric Hessian is rejected") {
    const ControlProblem p{
        .id = "plane",
        .state_dim = 2,
        .noise_dim = 2,
        .t0 = 0.0,
        .T = 1.0,
        .drift = [](double, const Vec&, const Vec&) { return Vec{0.0, 0.0}; },
        .diffusion = [](double, const Vec&, const Vec&) { return Mat(2, 2, 0.0); },
        .running_reward = [](double, const Vec&, const Vec&) { return 0.0; },
        .terminal_reward = [](const Vec&) { return 0.0; },
        .controls = ControlBox({0.0}, {0.0}, {1}),
    };
    TestFunction h{
        .id = "xy",
        .value = [](double, const Vec& x) { return x[0] * x[1]; },
        .dt = [](double, const Vec&) { return 0.0; },
        .dx = [](double, const Vec& x) { return Vec{x[1], x[0]}; },
        .dxx = [](double, const Vec&) {
            Mat m(2, 2, 1.0);
            m(0, 0) = m(1, 1) = 0.0;
            return m;
        },
    };
    const std::vector<TimeState> pts = {{0.5, {0.3, -0.7}}};
    CHECK(check_test_function(h, p, pts).ok);
    h.dxx = [](double, const Vec&) {
        Mat m(2, 2, 0.0);
        m(0, 1) = 1.0;
        m(1, 0) = 1.0 + 1e-6;
        return m;
    };
    CHECK_FALSE(inspect_test_function(h, p, pts).ok);
}

TEST_CASE("terminal matching is checked against g") {
    const ControlProblem p = testing::constant_problem(0.0, 1.0, 0.0, 1.0);
    TestFunction h = testing::quadratic(1.0, 1.0, 0.0);
    h.terminal_matches_g = true;
    const std::vector<TimeState> pts = {{0.5, {1.0}}, {0.25, {-2.0}}};
    const DerivativeCheckReport ok = check_test_function(h, p, pts);
    CHECK(ok.ok);
    REQUIRE(ok.points[0].terminal_error.has_value());
    CHECK(*ok.points[0].terminal_error <= 1e-12);

    TestFunction off = testing::quadratic(1.0, 1.0, 0.1);
    off.terminal_matches_g = true;
    CHECK_FALSE(inspect_test_function(off, p, pts).ok);
}

TEST_CASE("shifted test functions drop the terminal claim") {
    TestFunction h = testing::quadratic(1.0, 1.0, 0.0);
    h.terminal_matches_g = true;
    const TestFunction s = h.shifted(0.5);
    CHECK_FALSE(s.terminal_matches_g);
    CHECK(s(0.2, Vec{1.0}) == h(0.2, Vec{1.0}) + 0.5);
    CHECK(s.shifted(0.25).offset == 0.75);
    CHECK(s.dx(0.2, Vec{1.0})[0] == h.dx(0.2, Vec{1.0})[0]);
    CHECK(h.shifted(0.0).terminal_matches_g);
}

}  // TEST_SUITE
