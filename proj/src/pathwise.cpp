#include "dualbound/dual.hpp"
#include "dualbound/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualbound {

void PathwiseDPConfig::check(std::size_t state_dim, std::size_t control_dim) const {
    if (state_dim > 2) throw Error(ErrorCode::InvalidArgument, "pathwise DP supports state dimension 1 or 2");
    if (lower.size() != state_dim || upper.size() != state_dim || state_points.size() != state_dim)
        throw Error(ErrorCode::DimensionMismatch, "DP state box dimension does not match the state dimension");
    for (std::size_t a = 0; a < state_dim; ++a) {
        if (!(lower[a] < upper[a])) throw Error(ErrorCode::InvalidArgument, "DP state box requires lower < upper");
        if (state_points[a] < 2) throw Error(ErrorCode::InvalidArgument, "DP state grid needs >= 2 points per axis");
    }
    if (!control_points.empty()) {
        if (control_points.size() != control_dim)
            throw Error(ErrorCode::DimensionMismatch, "DP control resolution has wrong dimension");
        for (std::size_t n : control_points)
            if (n < 1) throw Error(ErrorCode::InvalidArgument, "DP control grid needs >= 1 point per axis");
    }
}

StateGrid::StateGrid(const PathwiseDPConfig& cfg)
    : lower_(cfg.lower), upper_(cfg.upper), spacing_(cfg.lower.size()), inv_spacing_(cfg.lower.size()), points_(cfg.state_points),
      strides_(cfg.lower.size()), nodes_(tensor_grid(cfg.lower, cfg.upper, cfg.state_points)) {
    const std::size_t d = lower_.size();
    std::size_t stride = 1;
    for (std::size_t a = d; a-- > 0;) {
        strides_[a] = stride;
        stride *= points_[a];
        spacing_[a] = (upper_[a] - lower_[a]) / static_cast<double>(points_[a] - 1);
        inv_spacing_[a] = 1.0 / spacing_[a];
    }
}

bool StateGrid::clamp(Vec& y) const {
    bool moved = false;
    for (std::size_t a = 0; a < y.size(); ++a) {
        if (y[a] < lower_[a]) {
            y[a] = lower_[a];
            moved = true;
        } else if (y[a] > upper_[a]) {
            y[a] = upper_[a];
            moved = true;
        }
    }
    return moved;
}

double StateGrid::interpolate(std::span<const double> values, const Vec& y) const {
    const std::size_t d = lower_.size();
    if (d == 1) return interpolate_1d(values, y[0]);
    std::size_t base[kMaxDim];
    double w[kMaxDim];
    for (std::size_t a = 0; a < d; ++a) {
        const double s = (y[a] - lower_[a]) * inv_spacing_[a];
        const double top = static_cast<double>(points_[a] - 2);
        const double cell = std::clamp(std::floor(s), 0.0, top);
        base[a] = static_cast<std::size_t>(cell);
        w[a] = s - cell;
    }

    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
        double weight = 1.0;
        std::size_t offset = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const bool up = (corner >> a) & 1U;
            weight *= up ? w[a] : 1.0 - w[a];
            offset += (base[a] + (up ? 1 : 0)) * strides_[a];
        }
        acc += weight * values[offset];
    }
    return acc;
}

namespace {

struct Transition {
    double reward;  // (dt h + Hcv)(t, y, u)
    Vec drift;
    Mat sigma;
};

ControlBox dp_controls(const ControlProblem& problem, const PathwiseDPConfig& cfg) {
    return cfg.control_points.empty() ? problem.controls : problem.controls.with_points(cfg.control_points);
}

// Transitions out of (t, y): the control grid followed by the clamped hook.
void build_transitions(const ControlProblem& problem, const TestFunction& h, const ControlBox& box, double t,
                       const Vec& y, std::vector<Transition>& out) {
    out.clear();
    const Jet jet = h.jet(t, y);
    const HamiltonianQuery q{t, y, jet.dx, jet.dxx};
    auto add = [&](const Vec& u) {
        out.push_back({jet.dt + hcv(problem, q, u), problem.drift(t, y, u), problem.diffusion(t, y, u)});
    };
    for (const Vec& u : box.grid()) add(u);
    if (box.has_argmax()) {
        const Vec hook = box.argmax()(t, y, jet.dx, jet.dxx);
        if (hook.size() != box.dim() || !all_finite(hook))
            throw Error(ErrorCode::NonFinite, "argmax hook returned an invalid control");
        add(box.clamp(hook));
    }
}

// max over transitions of reward dt + continuation(y + b dt + sigma dW).
double best_transition(const StateGrid& sg, std::span<const Transition> transitions, const Vec& y,
                       std::span<const double> dW, double dt, std::span<const double> continuation,
                       PathwiseResult& stats) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Transition& tr : transitions) {
        Vec next = euler_step(y, tr.drift, tr.sigma, dW, dt);
        if (sg.clamp(next)) ++stats.clamped;
        ++stats.transitions;
        const double cand = tr.reward * dt + sg.interpolate(continuation, next);
        if (cand > best) best = cand;
    }
    return best;
}

std::vector<double> terminal_values(const ControlProblem& problem, const TestFunction& h, const StateGrid& sg) {
    std::vector<double> v(sg.size());
    for (std::size_t j = 0; j < sg.size(); ++j) {
        v[j] = problem.terminal_reward(sg.node(j)) - h.value(problem.T, sg.node(j));
        if (!std::isfinite(v[j])) throw Error(ErrorCode::NonFinite, "terminal gap is not finite on the DP grid");
    }
    return v;
}

// Scalar state and noise: transitions flattened to y + b dt, sigma and
// reward dt so the inner loop avoids the small-vector machinery. Same
// arithmetic as euler_step / best_transition.
struct FlatTable {
    std::size_t controls = 0;
    std::vector<double> base;  // nodes x controls
    std::vector<double> vol;
    std::vector<double> gain;

    void assign(std::span<const std::vector<Transition>> table, std::span<const Vec> nodes, double dt) {
        controls = table[0].size();
        base.resize(table.size() * controls);
        vol.resize(base.size());
        gain.resize(base.size());
        for (std::size_t j = 0; j < table.size(); ++j) {
            for (std::size_t c = 0; c < controls; ++c) {
                const Transition& tr = table[j][c];
                base[j * controls + c] = nodes[j][0] + tr.drift[0] * dt;
                vol[j * controls + c] = tr.sigma(0, 0);
                gain[j * controls + c] = tr.reward * dt;
            }
        }
    }

    void step(const StateGrid& sg, double dW, std::span<const double> next, std::span<double> cur,
              PathwiseResult& stats) const {
        const double lo = sg.lower_1d(), hi = sg.upper_1d();
        std::size_t clamped = 0;
        for (std::size_t j = 0; j < cur.size(); ++j) {
            double best = -std::numeric_limits<double>::infinity();
            const std::size_t row = j * controls;
            for (std::size_t c = 0; c < controls; ++c) {
                double y = base[row + c] + (0.0 + vol[row + c] * dW);
                if (y < lo) {
                    y = lo;
                    ++clamped;
                } else if (y > hi) {
                    y = hi;
                    ++clamped;
                }
                const double cand = gain[row + c] + sg.interpolate_1d(next, y);
                if (cand > best) best = cand;
            }
            cur[j] = best;
        }
        stats.clamped += clamped;
        stats.transitions += cur.size() * controls;
    }
};

void check_inputs(const ControlProblem& problem, const TimeGrid& grid, const Vec& x, const PathwiseDPConfig& cfg) {
    problem.check();
    grid.check();
    cfg.check(problem.state_dim, problem.control_dim());
    if (grid.end != problem.T || grid.start < problem.t0)
        throw Error(ErrorCode::InvalidArgument, "time grid must end at T and start inside [t0, T)");
    if (x.size() != problem.state_dim) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong dimension");
}

}  // namespace

PathwiseResult pathwise_inner_max(const ControlProblem& problem, const TestFunction& h, const BrownianPath& path,
                                  const Vec& x, const PathwiseDPConfig& cfg) {
    check_inputs(problem, path.grid, x, cfg);
    const StateGrid sg(cfg);
    const ControlBox box = dp_controls(problem, cfg);
    const TimeGrid& grid = path.grid;
    const double dt = grid.dt();

    std::vector<double> next = terminal_values(problem, h, sg);
    std::vector<double> cur(sg.size());
    std::vector<Transition> transitions;
    PathwiseResult result;

    for (std::size_t k = grid.steps; k-- > 1;) {
        const double t = grid.node(k);
        for (std::size_t j = 0; j < sg.size(); ++j) {
            build_transitions(problem, h, box, t, sg.node(j), transitions);
            cur[j] = best_transition(sg, transitions, sg.node(j), path.increment(k), dt, next, result);
        }
        std::swap(cur, next);
    }
    build_transitions(problem, h, box, grid.node(0), x, transitions);
    result.value = best_transition(sg, transitions, x, path.increment(0), dt, next, result);
    return result;
}

std::vector<PathwiseResult> pathwise_values(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                            std::size_t n_paths, const TimeGrid& grid, const PathwiseDPConfig& cfg,
                                            std::uint64_t seed, Execution exec) {
    check_inputs(problem, grid, x, cfg);
    if (n_paths < 1) throw Error(ErrorCode::InvalidArgument, "pathwise values need n_paths >= 1");
    std::vector<PathwiseResult> results(n_paths);

    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n_paths; ++i)
            results[i] = pathwise_inner_max(problem, h, sample_brownian(grid, problem.noise_dim, seed, i), x, cfg);
        return results;
    }

    // Batched engine: paths are processed in chunks; for each time step the
    // transition table (rewards, drifts, diffusions at every node/control)
    // is built once and shared by all paths of the chunk.
    constexpr std::size_t kChunk = 1024;
    const StateGrid sg(cfg);
    const ControlBox box = dp_controls(problem, cfg);
    const double dt = grid.dt();
    const std::vector<double> terminal = terminal_values(problem, h, sg);
    const std::size_t J = sg.size();

    std::vector<std::vector<Transition>> table(J);
    const bool scalar = problem.state_dim == 1 && problem.noise_dim == 1;
    std::vector<Vec> nodes(J);
    for (std::size_t j = 0; j < J; ++j) nodes[j] = sg.node(j);
    FlatTable flat;
    for (std::size_t first = 0; first < n_paths; first += kChunk) {
        const std::size_t count = std::min(kChunk, n_paths - first);
        std::vector<BrownianPath> paths(count);
        for_each_index(count, exec, [&](std::size_t p) {
            paths[p] = sample_brownian(grid, problem.noise_dim, seed, first + p);
        });
        std::vector<std::vector<double>> next(count, terminal);
        std::vector<std::vector<double>> cur(count, std::vector<double>(J));

        for (std::size_t k = grid.steps; k-- > 1;) {
            const double t = grid.node(k);
            for_each_index(J, exec, [&](std::size_t j) { build_transitions(problem, h, box, t, sg.node(j), table[j]); });
            if (scalar) {
                flat.assign(table, nodes, dt);
                for_each_index(count, exec, [&](std::size_t p) {
                    flat.step(sg, paths[p].increment(k)[0], next[p], cur[p], results[first + p]);
                    std::swap(cur[p], next[p]);
                });
                continue;
            }
            for_each_index(count, exec, [&](std::size_t p) {
                const auto dW = paths[p].increment(k);
                for (std::size_t j = 0; j < J; ++j)
                    cur[p][j] = best_transition(sg, table[j], sg.node(j), dW, dt, next[p], results[first + p]);
                std::swap(cur[p], next[p]);
            });
        }
        build_transitions(problem, h, box, grid.node(0), x, table[0]);
        for_each_index(count, exec, [&](std::size_t p) {
            PathwiseResult& r = results[first + p];
            r.value = best_transition(sg, table[0], x, paths[p].increment(0), dt, next[p], r);
        });
    }
    return results;
}

BoundEstimate dual_v1(const ControlProblem& problem, const TestFunction& h, const Vec& x, std::size_t n_paths,
                      const TimeGrid& grid, const PathwiseDPConfig& cfg, std::uint64_t seed, Execution exec) {
    if (n_paths < 2) throw Error(ErrorCode::InvalidArgument, "dual_v1 needs n_paths >= 2");
    return summarize_pathwise(problem, h, x, grid, cfg, seed,
                              pathwise_values(problem, h, x, n_paths, grid, cfg, seed, exec));
}

BoundEstimate summarize_pathwise(const ControlProblem& problem, const TestFunction& h, const Vec& x,
                                 const TimeGrid& grid, const PathwiseDPConfig& cfg, std::uint64_t seed,
                                 std::span<const PathwiseResult> per_path) {
    const std::size_t n_paths = per_path.size();

    std::vector<double> values(n_paths);
    std::size_t transitions = 0, clamped = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        values[i] = per_path[i].value;
        transitions += per_path[i].transitions;
        clamped += per_path[i].clamped;
    }
    const MeanEstimate m = summarize(values);
    const double h0 = h.value(grid.start, x);

    BoundEstimate est;
    est.kind = EstimateKind::dual_v1;
    est.value = h0 + m.mean;
    est.std_error = m.std_error;
    est.n_paths = n_paths;
    est.dt = grid.dt();
    est.n_steps = grid.steps;
    est.seed = seed;
    est.problem_id = problem.id;
    est.source_id = h.id;
    est.t = grid.start;
    est.x = x;
    est.clamp_fraction = transitions == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(transitions);
    const std::vector<double> terminal = terminal_values(problem, h, StateGrid(cfg));
    est.terminal_gap = *std::max_element(terminal.begin(), terminal.end()) - h.offset;
    if (!std::isfinite(est.value)) throw Error(ErrorCode::NonFinite, "dual_v1 estimate is not finite");
    return est;
}

}  // namespace dualbound
