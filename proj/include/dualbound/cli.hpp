#pragma once

// Batch driver: key = value config files in, report.json and series.csv out.

#include "dualbound/benchmarks.hpp"
#include "dualbound/dual.hpp"
#include "dualbound/estimate.hpp"
#include "dualbound/hjb.hpp"
#include "dualbound/search.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dualbound::cli {

inline constexpr std::string_view kToolName = "dualbound";
inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailed = 2;

enum class Subcommand { primal, dual1, dual2, search, hjb_check, bench, diagnose_degeneracy };

std::string_view subcommand_name(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view name);
std::vector<std::string> subcommand_names();

struct RunConfig {
    Subcommand subcommand = Subcommand::bench;
    std::string problem;
    double t = 0.0;
    std::vector<double> x;  // empty: benchmark default
    std::size_t n_paths = 2000;
    std::size_t n_steps = 100;
    std::uint64_t seed = 1;

    std::string h = "oracle";  // "oracle" or a family id
    std::vector<double> h_params;
    double h_shift = 0.0;

    std::string policy = "oracle";  // "oracle" or "constant"
    std::vector<double> policy_value;

    std::string output = ".";

    // Spatial box for the pointwise supremum and the DP state grid; empty
    // fields take the benchmark default.
    std::vector<double> box_lower;
    std::vector<double> box_upper;
    std::vector<std::size_t> box_points;
    std::optional<int> box_refine;

    std::vector<std::size_t> dp_state_points = {101};
    std::vector<std::size_t> dp_control_points = {11};

    std::string search_family = "oracle-affine";
    std::string search_objective = "dual_v2";
    std::size_t search_budget = 200;
    std::vector<double> search_initial;
    std::vector<double> search_scale;

    std::optional<double> hjb_tau;
    std::size_t hjb_time_points = 9;

    std::vector<std::size_t> bench_n_steps = {100};
    double bench_allowance = kDefaultAllowanceFactor;

    double degeneracy_tol = 1e-8;

    // Raw key/value pairs in file order.
    std::vector<std::pair<std::string, std::string>> entries;
};

// Parses "key = value" lines. '#' starts a comment; "[section]" prefixes the
// following keys with "section.". Lists are comma separated. Throws
// Error(InvalidConfig) for malformed lines, unknown keys or bad values.
RunConfig parse_config(std::string_view text, Subcommand subcommand);
RunConfig load_config(const std::filesystem::path& path, Subcommand subcommand);

// Effective configuration (after defaults) as JSON.
nlohmann::json config_to_json(const RunConfig& cfg);

// Executes the run, writing report.json and series.csv into cfg.output.
// Returns the process exit status.
int run(const RunConfig& cfg);

// Parses the config file and runs; configuration errors still produce a
// report.json when the output directory is known.
int run_file(Subcommand subcommand, const std::filesystem::path& config_path);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

nlohmann::json to_json(const BoundEstimate& e);
nlohmann::json to_json(const GapReport& g);
nlohmann::json to_json(const SandwichReport& s);
nlohmann::json to_json(const HJBReport& r);
nlohmann::json to_json(const SearchTrace& t);
nlohmann::json to_json(const DegeneracyReport& d);

// Shortest round-trip decimal representation.
std::string format_double(double v);

struct ConvergenceRow {
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::optional<double> primal;
    std::optional<double> primal_se;
    std::optional<double> dual1;
    std::optional<double> dual1_se;
    std::optional<double> dual2;
    std::optional<double> gap;
};

inline constexpr std::string_view kTraceHeader = "iteration,objective,objective_se,is_best";
inline constexpr std::string_view kConvergenceHeader = "n_steps,dt,primal,primal_se,dual1,dual1_se,dual2,gap";

std::string trace_csv(const SearchTrace& trace);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

// Writes text to path; throws Error(IoError).
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace dualbound::cli
