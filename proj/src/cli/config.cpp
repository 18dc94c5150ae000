#include "dualbound/cli.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dualbound::cli {

namespace {

constexpr std::pair<Subcommand, std::string_view> kSubcommands[] = {
    {Subcommand::primal, "primal"},
    {Subcommand::dual1, "dual1"},
    {Subcommand::dual2, "dual2"},
    {Subcommand::search, "search"},
    {Subcommand::hjb_check, "hjb-check"},
    {Subcommand::bench, "bench"},
    {Subcommand::diagnose_degeneracy, "diagnose-degeneracy"},
};

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "config key '" + key + "': " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) bad(key, "expected a number, got '" + std::string(s) + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        bad(key, "expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, std::string_view s) {
    std::vector<double> out;
    for (std::string_view part : split(s)) out.push_back(to_double(key, part));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, std::string_view s) {
    std::vector<std::size_t> out;
    for (std::string_view part : split(s)) out.push_back(to_uint(key, part));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"problem", [](RunConfig& c, auto&, auto& v) { c.problem = v; }},
        {"t", [](RunConfig& c, auto& k, auto& v) { c.t = to_double(k, v); }},
        {"x", [](RunConfig& c, auto& k, auto& v) { c.x = to_doubles(k, v); }},
        {"n_paths", [](RunConfig& c, auto& k, auto& v) { c.n_paths = to_uint(k, v); }},
        {"n_steps", [](RunConfig& c, auto& k, auto& v) { c.n_steps = to_uint(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
        {"h", [](RunConfig& c, auto&, auto& v) { c.h = v; }},
        {"h.params", [](RunConfig& c, auto& k, auto& v) { c.h_params = to_doubles(k, v); }},
        {"h.shift", [](RunConfig& c, auto& k, auto& v) { c.h_shift = to_double(k, v); }},
        {"policy", [](RunConfig& c, auto&, auto& v) { c.policy = v; }},
        {"policy.value", [](RunConfig& c, auto& k, auto& v) { c.policy_value = to_doubles(k, v); }},
        {"output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
        {"box.lower", [](RunConfig& c, auto& k, auto& v) { c.box_lower = to_doubles(k, v); }},
        {"box.upper", [](RunConfig& c, auto& k, auto& v) { c.box_upper = to_doubles(k, v); }},
        {"box.points", [](RunConfig& c, auto& k, auto& v) { c.box_points = to_sizes(k, v); }},
        {"box.refine", [](RunConfig& c, auto& k, auto& v) { c.box_refine = static_cast<int>(to_uint(k, v)); }},
        {"dp.state_points", [](RunConfig& c, auto& k, auto& v) { c.dp_state_points = to_sizes(k, v); }},
        {"dp.control_points", [](RunConfig& c, auto& k, auto& v) { c.dp_control_points = to_sizes(k, v); }},
        {"search.family", [](RunConfig& c, auto&, auto& v) { c.search_family = v; }},
        {"search.objective", [](RunConfig& c, auto& k, auto& v) {
             if (v != "dual_v1" && v != "dual_v2") bad(k, "expected dual_v1 or dual_v2");
             c.search_objective = v;
         }},
        {"search.budget", [](RunConfig& c, auto& k, auto& v) { c.search_budget = to_uint(k, v); }},
        {"search.initial", [](RunConfig& c, auto& k, auto& v) { c.search_initial = to_doubles(k, v); }},
        {"search.scale", [](RunConfig& c, auto& k, auto& v) { c.search_scale = to_doubles(k, v); }},
        {"hjb.tau", [](RunConfig& c, auto& k, auto& v) { c.hjb_tau = to_double(k, v); }},
        {"hjb.time_points", [](RunConfig& c, auto& k, auto& v) { c.hjb_time_points = to_uint(k, v); }},
        {"bench.n_steps", [](RunConfig& c, auto& k, auto& v) { c.bench_n_steps = to_sizes(k, v); }},
        {"bench.allowance", [](RunConfig& c, auto& k, auto& v) { c.bench_allowance = to_double(k, v); }},
        {"degeneracy.tol", [](RunConfig& c, auto& k, auto& v) { c.degeneracy_tol = to_double(k, v); }},
    };
    return table;
}

void check_ranges(const RunConfig& c) {
    if (c.problem.empty()) bad("problem", "required");
    if (c.n_paths < 2) bad("n_paths", "must be >= 2");
    if (c.n_steps < 1) bad("n_steps", "must be >= 1");
    if (c.policy != "oracle" && c.policy != "constant") bad("policy", "expected oracle or constant");
    if (c.policy == "constant" && c.policy_value.empty()) bad("policy.value", "required for a constant policy");
    if (c.hjb_time_points < 1) bad("hjb.time_points", "must be >= 1");
    if (c.hjb_tau && !(*c.hjb_tau >= 0.0)) bad("hjb.tau", "must be >= 0");
    if (c.bench_n_steps.empty()) bad("bench.n_steps", "needs at least one entry");
    for (std::size_t n : c.bench_n_steps)
        if (n < 1) bad("bench.n_steps", "entries must be >= 1");
    if (!(c.bench_allowance >= 0.0)) bad("bench.allowance", "must be >= 0");
    if (!(c.degeneracy_tol >= 0.0)) bad("degeneracy.tol", "must be >= 0");
    if (c.output.empty()) bad("output", "must not be empty");
}

}  // namespace

std::string_view subcommand_name(Subcommand s) {
    for (const auto& [sub, name] : kSubcommands)
        if (sub == s) return name;
    return "?";
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
    for (const auto& [sub, n] : kSubcommands)
        if (n == name) return sub;
    return std::nullopt;
}

std::vector<std::string> subcommand_names() {
    std::vector<std::string> out;
    for (const auto& entry : kSubcommands) out.emplace_back(entry.second);
    return out;
}

RunConfig parse_config(std::string_view text, Subcommand subcommand) {
    RunConfig cfg;
    cfg.subcommand = subcommand;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": unterminated section");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
        std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!section.empty()) key = section + "." + key;
        const auto it = setters().find(key);
        if (it == setters().end()) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
        for (const auto& [seen, _] : cfg.entries)
            if (seen == key) throw Error(ErrorCode::InvalidConfig, "duplicate config key '" + key + "'");
        it->second(cfg, key, value);
        cfg.entries.emplace_back(key, value);
    }
    check_ranges(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, Subcommand subcommand) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), subcommand);
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["subcommand"] = subcommand_name(c.subcommand);
    j["problem"] = c.problem;
    j["t"] = c.t;
    j["x"] = c.x;
    j["n_paths"] = c.n_paths;
    j["n_steps"] = c.n_steps;
    j["seed"] = c.seed;
    j["h"] = {{"id", c.h}, {"params", c.h_params}, {"shift", c.h_shift}};
    j["policy"] = {{"kind", c.policy}, {"value", c.policy_value}};
    j["output"] = c.output;
    j["box"] = {{"lower", c.box_lower}, {"upper", c.box_upper}, {"points", c.box_points}};
    j["box"]["refine"] = c.box_refine ? nlohmann::json(*c.box_refine) : nlohmann::json(nullptr);
    j["dp"] = {{"state_points", c.dp_state_points}, {"control_points", c.dp_control_points}};
    j["search"] = {{"family", c.search_family},
                   {"objective", c.search_objective},
                   {"budget", c.search_budget},
                   {"initial", c.search_initial},
                   {"scale", c.search_scale}};
    j["hjb"] = {{"tau", c.hjb_tau ? nlohmann::json(*c.hjb_tau) : nlohmann::json(nullptr)},
                {"time_points", c.hjb_time_points}};
    j["bench"] = {{"n_steps", c.bench_n_steps}, {"allowance", c.bench_allowance}};
    j["degeneracy"] = {{"tol", c.degeneracy_tol}};
    nlohmann::json raw = nlohmann::json::array();
    for (const auto& [k, v] : c.entries) raw.push_back({k, v});
    j["entries"] = raw;
    return j;
}

}  // namespace dualbound::cli
