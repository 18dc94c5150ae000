#include "dualbound/cli.hpp"

#include <array>
#include <charconv>
#include <fstream>

namespace dualbound::cli {

using nlohmann::json;

namespace {

json vec(const Vec& v) { return json(std::vector<double>(v.begin(), v.end())); }

json stats(const ResidualStats& s) {
    return {{"min", s.min},
            {"max", s.max},
            {"mean", s.mean},
            {"argmin", {{"t", s.argmin.t}, {"x", vec(s.argmin.x)}}},
            {"argmax", {{"t", s.argmax.t}, {"x", vec(s.argmax.x)}}}};
}

json box(const SpatialBox& b) {
    return {{"lower", vec(b.lower)}, {"upper", vec(b.upper)}, {"points", b.points}, {"refine", b.refinement_levels}};
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw Error(ErrorCode::IoError, "number formatting failed");
    return std::string(buf.data(), end);
}

json to_json(const BoundEstimate& e) {
    return {{"kind", kind_name(e.kind)},
            {"value", e.value},
            {"std_error", e.std_error},
            {"n_paths", e.n_paths},
            {"dt", e.dt},
            {"n_steps", e.n_steps},
            {"seed", e.seed},
            {"problem_id", e.problem_id},
            {"source_id", e.source_id},
            {"t", e.t},
            {"x", vec(e.x)},
            {"boundary_attained", e.boundary_attained},
            {"clamp_fraction", e.clamp_fraction},
            {"terminal_gap", e.terminal_gap},
            {"trusted", e.trusted()}};
}

json to_json(const GapReport& g) {
    return {{"primal", to_json(g.primal)},
            {"dual", to_json(g.dual)},
            {"gap", g.gap},
            {"combined_std_error", g.combined_std_error},
            {"relative_gap", g.relative_gap},
            {"allowance", g.allowance},
            {"boundary_attained", g.boundary_attained},
            {"clamp_fraction", g.clamp_fraction},
            {"failed", g.failed}};
}

json to_json(const SandwichReport& s) {
    return {{"primal_vs_dual_v1", to_json(s.primal_v1)},
            {"dual_v1_vs_dual_v2", to_json(s.v1_v2)},
            {"allowance", s.allowance},
            {"failed", s.failed}};
}

json to_json(const HJBReport& r) {
    return {{"time_points", r.time_points},
            {"box", box(r.box)},
            {"tau", r.tau},
            {"residual", stats(r.residual)},
            {"terminal_mismatch", stats(r.terminal_mismatch)},
            {"classification", classification_name(r.classification)}};
}

json to_json(const SearchTrace& t) {
    json evals = json::array();
    for (const SearchEvaluation& e : t.evaluations) {
        json j = {{"iteration", e.iteration},
                  {"theta", e.theta},
                  {"objective", e.valid ? json(e.objective) : json(nullptr)},
                  {"valid", e.valid},
                  {"rejection", e.rejection}};
        if (e.valid) j["estimate"] = to_json(e.estimate);
        evals.push_back(std::move(j));
    }
    return {{"family", t.family_id},
            {"objective", objective_name(t.objective)},
            {"seed", t.seed},
            {"best_index", t.best_index},
            {"best_theta", t.best().theta},
            {"best_objective", t.best().valid ? json(t.best().objective) : json(nullptr)},
            {"evaluations", std::move(evals)}};
}

json to_json(const DegeneracyReport& d) {
    return {{"pointwise", d.pointwise},
            {"mean_gap", d.mean_gap},
            {"gap_std_error", d.gap_std_error},
            {"min_gap", d.min_gap},
            {"max_gap", d.max_gap},
            {"median_gap", d.median_gap},
            {"fraction_degenerate", d.fraction_degenerate},
            {"tolerance", d.tolerance},
            {"dual_v1", to_json(d.v1)},
            {"dual_v2", to_json(d.v2)}};
}

std::string trace_csv(const SearchTrace& trace) {
    std::string out(kTraceHeader);
    out += '\n';
    double best = std::numeric_limits<double>::infinity();
    for (const SearchEvaluation& e : trace.evaluations) {
        const bool improves = e.objective < best;
        if (improves) best = e.objective;
        out += std::to_string(e.iteration) + ',' + format_double(e.objective) + ',' +
               format_double(e.valid ? e.estimate.std_error : std::numeric_limits<double>::infinity()) + ',' +
               (improves ? "1" : "0") + '\n';
    }
    return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out(kConvergenceHeader);
    out += '\n';
    for (const ConvergenceRow& r : rows) {
        out += std::to_string(r.n_steps) + ',' + format_double(r.dt) + ',' + cell(r.primal) + ',' + cell(r.primal_se) +
               ',' + cell(r.dual1) + ',' + cell(r.dual1_se) + ',' + cell(r.dual2) + ',' + cell(r.gap) + '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace dualbound::cli
