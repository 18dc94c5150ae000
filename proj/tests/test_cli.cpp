#include "dualbound/cli.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace dualbound;
using namespace dualbound::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dualbound-unit-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

ErrorCode parse_error(const std::string& text) {
    try {
        parse_config(text, Subcommand::bench);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config parsed without error");
    return ErrorCode::IoError;
}

SearchEvaluation evaluation(std::size_t i, double objective) {
    SearchEvaluation e;
    e.iteration = i;
    e.objective = objective;
    e.valid = std::isfinite(objective);
    e.estimate.std_error = 0.0;
    return e;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("subcommand names round-trip") {
    for (const std::string& name : subcommand_names()) {
        const auto sub = parse_subcommand(name);
        REQUIRE(sub.has_value());
        CHECK(subcommand_name(*sub) == name);
    }
    CHECK(subcommand_names().size() == 7);
    CHECK_FALSE(parse_subcommand("nope").has_value());
}

TEST_CASE("config parsing with comments, sections and lists") {
    const RunConfig c = parse_config(R"(
# leading comment
problem = b2-lq-drift
x = 1.5            # trailing comment
n_paths = 64
seed = 9
h = oracle-affine
h.params = -0.1, 0.2, 0

[box]
lower = -4
upper = 4
points = 81
refine = 1

[bench]
n_steps = 10, 20
)",
                                     Subcommand::bench);
    CHECK(c.problem == "b2-lq-drift");
    CHECK(c.x == std::vector<double>{1.5});
    CHECK(c.n_paths == 64);
    CHECK(c.seed == 9);
    CHECK(c.h_params == std::vector<double>{-0.1, 0.2, 0.0});
    CHECK(c.box_lower == std::vector<double>{-4.0});
    CHECK(c.box_points == std::vector<std::size_t>{81});
    REQUIRE(c.box_refine.has_value());
    CHECK(*c.box_refine == 1);
    CHECK(c.bench_n_steps == std::vector<std::size_t>{10, 20});
    CHECK(c.n_steps == 100);
    CHECK(c.entries.size() == 11);
    CHECK(c.entries.front().first == "problem");
    CHECK(c.entries.back().first == "bench.n_steps");
}

TEST_CASE("config errors") {
    CHECK(parse_error("problem = b1-brownian-quadratic\nbogus = 1\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\nproblem = b\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\nn_paths = many\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\nn_paths = 1\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\n[box\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\njust words\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("n_paths = 10\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\npolicy = constant\n") == ErrorCode::InvalidConfig);
    CHECK(parse_error("problem = a\nsearch.objective = primal\n") == ErrorCode::InvalidConfig);
}

TEST_CASE("echoed config lists effective values") {
    const RunConfig c = parse_config("problem = b1-brownian-quadratic\n", Subcommand::dual2);
    const nlohmann::json j = config_to_json(c);
    CHECK(j["subcommand"] == "dual2");
    CHECK(j["n_paths"] == 2000);
    CHECK(j["box"]["refine"].is_null());
    CHECK(j["entries"].size() == 1);
}

TEST_CASE("doubles are written with round-trip precision") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("trace CSV rows") {
    SearchTrace empty;
    CHECK(trace_csv(empty) == std::string(kTraceHeader) + "\n");

    SearchTrace t;
    t.evaluations = {evaluation(0, 3.0), evaluation(1, std::numeric_limits<double>::infinity()), evaluation(2, 2.0)};
    const std::string csv = trace_csv(t);
    CHECK(line_count(csv) == 4);
    CHECK(csv == "iteration,objective,objective_se,is_best\n0,3,0,1\n1,inf,inf,0\n2,2,0,1\n");
}

TEST_CASE("convergence CSV column order") {
    ConvergenceRow a;
    a.n_steps = 100;
    a.dt = 1e-2;
    a.primal = 1.5;
    a.primal_se = 0.01;
    a.dual1 = 1.75;
    a.dual1_se = 0.02;
    a.dual2 = 2.0;
    a.gap = 0.25;
    ConvergenceRow b;
    b.n_steps = 1000;
    b.dt = 1e-3;
    b.dual2 = 2.0;
    const std::string csv = convergence_csv({a, b});
    CHECK(csv == "n_steps,dt,primal,primal_se,dual1,dual1_se,dual2,gap\n"
                 "100,0.01,1.5,0.01,1.75,0.02,2,0.25\n"
                 "1000,0.001,,,,,2,\n");
}

TEST_CASE("writing to a missing directory is an IoError") {
    try {
        write_text("/nonexistent-dir/for/sure/file.txt", "x");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("bench on the Brownian-quadratic benchmark with defaults") {
    const fs::path dir = scratch_dir("bench-b1");
    RunConfig c = parse_config("problem = b1-brownian-quadratic\n", Subcommand::bench);
    c.output = dir.string();
    REQUIRE(run(c) == kExitOk);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["status"] == "ok");
    CHECK(report["tool"] == "dualbound");
    CHECK(report["version"] == std::string(kToolVersion));
    const auto& sw = report["results"]["levels"][0]["sandwich"];
    const auto& primal = sw["primal_vs_dual_v1"]["primal"];
    const auto& v2 = sw["dual_v1_vs_dual_v2"]["dual"];
    CHECK(v2["value"].get<double>() == 2.0);
    CHECK(sw["primal_vs_dual_v1"]["dual"]["value"].get<double>() == 2.0);
    const double p = primal["value"].get<double>();
    const double se = primal["std_error"].get<double>();
    CHECK(std::abs(p - 2.0) <= 3.0 * se);
    CHECK(primal["seed"] == 1);
    CHECK(primal["n_steps"] == 100);
    CHECK(line_count(slurp(dir / "series.csv")) == 2);
}

TEST_CASE("report.json round-trips") {
    const fs::path dir = scratch_dir("roundtrip");
    RunConfig c = parse_config("problem = b3-lq-diffusion\nn_paths = 50\nn_steps = 10\n[dp]\nstate_points = 21\n"
                               "control_points = 3\n",
                               Subcommand::bench);
    c.output = dir.string();
    REQUIRE(run(c) == kExitOk);
    const std::string text = slurp(dir / "report.json");
    const auto once = nlohmann::json::parse(text);
    const auto twice = nlohmann::json::parse(once.dump(2));
    CHECK(once == twice);
    CHECK(once.dump(2) + "\n" == text);
}

TEST_CASE("every subcommand produces a report and a series") {
    const char* base = "problem = b2-lq-drift\nn_paths = 20\nn_steps = 8\nsearch.budget = 4\nbench.n_steps = 4, 8\n"
                       "[dp]\nstate_points = 21\ncontrol_points = 3\n[box]\npoints = 41\nrefine = 0\n";
    for (const std::string& name : subcommand_names()) {
        CAPTURE(name);
        const fs::path dir = scratch_dir("sub-" + name);
        RunConfig c = parse_config(base, *parse_subcommand(name));
        c.output = dir.string();
        CHECK(run(c) == kExitOk);
        const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
        CHECK(report["subcommand"] == name);
        CHECK(report["status"] == "ok");
        CHECK(report.contains("results"));
        CHECK(line_count(slurp(dir / "series.csv")) >= 2);
    }
}

TEST_CASE("unknown problems exit with status 1 and a machine-readable code") {
    const fs::path dir = scratch_dir("unknown");
    RunConfig c = parse_config("problem = no-such-problem\n", Subcommand::dual2);
    c.output = dir.string();
    CHECK(run(c) == kExitError);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["status"] == "error");
    CHECK(report["error"]["code"] == "UNKNOWN_PROBLEM");
}

TEST_CASE("config file errors are reported next to the config") {
    const fs::path dir = scratch_dir("badconfig");
    const fs::path cfg = dir / "run.cfg";
    write_text(cfg, "problem = b1-brownian-quadratic\nbogus = 3\n");
    CHECK(run_file(Subcommand::bench, cfg) == kExitError);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["error"]["code"] == "INVALID_CONFIG");
    CHECK(run_file(Subcommand::bench, dir / "missing.cfg") == kExitError);
}

TEST_CASE("a forced weak-duality violation exits with status 2") {
    const fs::path dir = scratch_dir("failed");
    // h = 0 on a box too small to hold the paths: both duals see at most
    // x^2 = 0.25 while the primal is 2.
    RunConfig c = parse_config("problem = b1-brownian-quadratic\nh = quadratic\nh.params = 0, 0, 0, 0\n"
                               "n_paths = 200\nbench.n_steps = 20\n[box]\nlower = -0.5\nupper = 0.5\n",
                               Subcommand::bench);
    c.output = dir.string();
    CHECK(run(c) == kExitFailed);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["status"] == "FAILED");
}

TEST_CASE("series.csv is byte-identical across repeated runs") {
    const char* text = "problem = b2-lq-drift\nn_paths = 300\n[dp]\nstate_points = 41\ncontrol_points = 5\n"
                       "[bench]\nn_steps = 10, 20\n";
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = scratch_dir("repeat-" + std::to_string(rep));
        RunConfig c = parse_config(text, Subcommand::bench);
        c.output = dir.string();
        REQUIRE(run(c) == kExitOk);
        const std::string series = slurp(dir / "series.csv");
        if (rep == 0)
            first = series;
        else
            CHECK(series == first);
    }
}

}  // TEST_SUITE
