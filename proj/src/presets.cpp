#include "qsync/presets.hpp"

#include "qsync/synchronization.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace qsync {

using nlohmann::json;

namespace {

const std::vector<double> kFig1Gain{1, 0.2, 20, 2, 2.5, 0.3};
const std::vector<double> kFig1DampB{4, 0.8, 80, 8, 10, 1.2};
const std::vector<double> kFig1DampC{0.5, 4, 80, 1, 0.5, 0.2};
constexpr double kFig1Uxy = 80.0, kFig1Uz = 1.0;

struct Fig3Panel {
    Topology topology;
    double ux, uy, uz;
    double gain_mult[3];
    double damp_mult[3];
};

Fig3Panel fig3_panel(char panel) {
    switch (panel) {
        case 'a': return {Topology::all_to_all, 2, 2, 1, {1.5, 2.5, 0.6}, {1.5, 2.5, 0.6}};
        case 'b': return {Topology::one_to_all, 2, 2, 1, {1.5, 2.5, 0.6}, {1.5, 2.5, 0.6}};
        case 'c': return {Topology::all_to_all, 2, 0.5, 1, {0.8, 5, 0.1}, {1.3, 0.9, 1.2}};
        case 'd': return {Topology::one_to_all, 2, 0.5, 1, {0.8, 5, 0.1}, {1.3, 0.9, 1.2}};
    }
    throw std::invalid_argument(std::string("fig3 panel must be a..d, got '") + panel + "'");
}

/// Reads numeric overrides, rejecting keys the preset does not know.
class Overrides {
public:
    Overrides(const json& o, std::set<std::string> allowed) : o_(o) {
        for (auto it = o.begin(); it != o.end(); ++it)
            if (!allowed.count(it.key())) throw ConfigError("overrides." + it.key(), "not a parameter of this preset");
    }
    double number(const std::string& key, double fallback) const {
        if (!o_.contains(key)) return fallback;
        if (!o_[key].is_number()) throw ConfigError("overrides." + key, "expected a number");
        return o_[key].get<double>();
    }
    int integer(const std::string& key, int fallback, int min) const {
        if (!o_.contains(key)) return fallback;
        if (!o_[key].is_number_integer() || o_[key].get<int>() < min)
            throw ConfigError("overrides." + key, "expected an integer >= " + std::to_string(min));
        return o_[key].get<int>();
    }

private:
    const json& o_;
};

std::string column_name(const std::string& run, const char* what) { return what + std::string("_") + run; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json sweep_summary(const SweepGrid& grid) {
    return {{"points", grid.point_count()}, {"rows_written", grid.rows.size()}, {"resumed_rows", grid.resumed_rows},
            {"failed_points", grid.failed_count()}, {"complete", grid.complete}};
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig1b", "fig1c", "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "figS1"};
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1.0);
    return v;
}

SystemSpec fig1_spec(char panel, bool interacting) {
    if (panel != 'b' && panel != 'c') throw std::invalid_argument("fig1 panel must be b or c");
    const auto& damp = panel == 'b' ? kFig1DampB : kFig1DampC;
    std::vector<QubitParams> q;
    for (std::size_t j = 0; j < kFig1Gain.size(); ++j) q.push_back({0.0, kFig1Gain[j], damp[j]});
    if (!interacting) return make_spec(std::move(q), 0, 0, 0, Topology::custom);
    return make_xxz_spec(std::move(q), kFig1Uxy, kFig1Uz, Topology::all_to_all);
}

TrajectorySet run_fidelity_trajectories(const SystemSpec& spec, const TrajectoryOptions& opts) {
    if (!(opts.t_min > 0.0) || opts.samples_per_decade < 1) throw std::invalid_argument("trajectories: bad time grid");
    SystemSpec free = spec;
    free.interactions.clear();
    free.topology = Topology::custom;

    const DensityMatrix rho0 = product_steady_state(spec);
    struct Run {
        std::string name;
        const Liouvillian* liouv;
        ComplexMatrix state;
        double last_step = 0.0;
    };
    const Liouvillian l_int = Liouvillian::from_spec(spec);
    const Liouvillian l_free = Liouvillian::from_spec(free);
    const DensityMatrix ghz = initial_state({StateInit::Kind::ghz, 0, {}}, spec);
    const DensityMatrix rnd = initial_state({StateInit::Kind::random_pure, opts.seed, {}}, spec);

    std::vector<Run> runs{{"ghz", &l_int, ghz.matrix()}, {"random", &l_int, rnd.matrix()}};
    if (opts.include_noninteracting) {
        runs.push_back({"ghz_free", &l_free, ghz.matrix()});
        runs.push_back({"random_free", &l_free, rnd.matrix()});
    }

    TrajectorySet set;
    for (const auto& r : runs) {
        Trajectory t;
        t.name = r.name;
        t.min_eigenvalue = std::numeric_limits<double>::infinity();
        set.runs.push_back(std::move(t));
    }

    double t_prev = 0.0;
    for (std::size_t i = 0;; ++i) {
        const double t = opts.t_min * std::pow(10.0, static_cast<double>(i) / opts.samples_per_decade);
        if (t > opts.t_cap)
            throw SolverError("trajectories: residual still above " + std::to_string(opts.residual_tol) +
                              " at t = " + std::to_string(opts.t_cap));
        set.times.push_back(t);
        bool all_converged = true;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            Run& run = runs[r];
            EvolveOptions eo;
            eo.rtol = opts.rtol;
            eo.atol = opts.atol;
            eo.retain_states = true;
            eo.initial_step = run.last_step;
            const EvolutionTrace tr = evolve_from(*run.liouv, run.state, t_prev, t, {t}, eo);
            run.state = tr.final_state;
            if (tr.stats.last_step > 0.0) run.last_step = tr.stats.last_step;

            Trajectory& out = set.runs[r];
            const DensityMatrix& rho = tr.states.back();
            out.fidelity.push_back(fidelity(rho, rho0));
            out.max_connected.push_back(max_connected_correlation(rho));
            const double res = run.liouv->apply(rho.matrix()).norm();
            out.residual.push_back(res);
            if (opts.correlation_sums) out.sums.push_back(correlation_sums(rho).sums);
            out.max_trace_error = std::max(out.max_trace_error, tr.max_trace_error);
            out.min_eigenvalue = std::min(out.min_eigenvalue, tr.min_eigenvalue);
            out.final_state = rho;
            all_converged = all_converged && res < opts.residual_tol;
            // less than a factor 2 over a decade past t = 10: integrator noise floor, not relaxation
            const auto spd = static_cast<std::size_t>(opts.samples_per_decade);
            if (res >= opts.residual_tol && t >= 10.0 && out.residual.size() > spd &&
                res > 0.5 * out.residual[out.residual.size() - 1 - spd])
                throw SolverError("trajectories: residual of run " + out.name + " stalled at " + std::to_string(res) +
                                  " by t = " + std::to_string(t) + "; tighten rtol/atol");
        }
        t_prev = t;
        if (all_converged) break;
    }
    set.horizon = set.times.back();
    return set;
}

SystemSpec fig2_spec(double m1, double m2, double u, double delta) {
    std::vector<QubitParams> q{qubit_with_magnetization(m1, delta), qubit_with_magnetization(m2, 0.0)};
    return make_spec(std::move(q), u, u, u, Topology::all_to_all);
}

SystemSpec fig3_spec(char panel, double m1, double m_env) {
    const Fig3Panel p = fig3_panel(panel);
    const QubitParams q2 = qubit_with_magnetization(m_env);
    std::vector<QubitParams> q{qubit_with_magnetization(m1), q2};
    for (int e = 0; e < 3; ++e) q.push_back({0.0, p.gain_mult[e] * q2.gamma_gain, p.damp_mult[e] * q2.gamma_damp});
    return make_spec(std::move(q), p.ux, p.uy, p.uz, p.topology);
}

SweepDefinition fig2_definition(const std::vector<SweepAxis>& axes, bool delta_u_axes) {
    if (axes.size() != 2) throw std::invalid_argument("fig2 sweeps have two axes");
    SweepDefinition def;
    def.axes = axes;
    def.outputs = steady_sync_columns(2);
    def.outputs.push_back({"analytic_ff_re", "Re <s+_1 s-_2> from the closed-form two-qubit expression"});
    def.outputs.push_back({"analytic_ff_im", "Im <s+_1 s-_2> from the closed-form two-qubit expression"});
    def.outputs.push_back({"analytic_s_max", "(pi/16)|closed-form <s+_1 s-_2>|"});
    def.fn = [delta_u_axes](std::span<const double> c) {
        const SystemSpec spec = delta_u_axes ? fig2_spec(0.25, -0.25, c[1], c[0]) : fig2_spec(c[0], c[1], 1.0, 0.0);
        std::vector<double> v = steady_sync_values(spec, std::nullopt, std::nullopt);
        const Complex a = two_qubit_analytic(two_qubit_params(spec.qubits[0], spec.qubits[1], spec.interactions[0].ux));
        v.push_back(a.real());
        v.push_back(a.imag());
        v.push_back(kSMaxPerFlipFlop * std::abs(a));
        return v;
    };
    return def;
}

SweepDefinition fig3_definition(char panel, int grid_points) {
    fig3_panel(panel);  // validates
    SweepDefinition def;
    const auto m = linspace(-1.0, 1.0, grid_points);
    def.axes = {{"m1", m}, {"m_env", m}};
    def.outputs = steady_sync_columns(5);
    def.fn = [panel](std::span<const double> c) {
        return steady_sync_values(fig3_spec(panel, c[0], c[1]), std::nullopt, std::nullopt);
    };
    return def;
}

PresetOutcome run_preset(const std::string& name, const PresetOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    PresetOutcome outcome;
    const std::filesystem::path dir = opts.out_dir;

    auto trajectory_preset = [&](const std::vector<char>& panels, bool sums) {
        const Overrides ov(opts.overrides, {"samples_per_decade", "residual_tol", "t_min", "t_cap", "rtol", "atol"});
        TrajectoryOptions to;
        to.samples_per_decade = ov.integer("samples_per_decade", to.samples_per_decade, 1);
        to.residual_tol = ov.number("residual_tol", to.residual_tol);
        to.t_min = ov.number("t_min", to.t_min);
        to.t_cap = ov.number("t_cap", to.t_cap);
        to.rtol = ov.number("rtol", to.rtol);
        to.atol = ov.number("atol", to.atol);
        to.seed = opts.seed;
        to.correlation_sums = sums;
        for (char panel : panels) {
            const auto tp = std::chrono::steady_clock::now();
            const SystemSpec spec = fig1_spec(panel);
            const TrajectorySet set = run_fidelity_trajectories(spec, to);

            std::vector<Column> cols{{"t", "time in inverse-rate units (log-spaced samples)"}};
            for (const auto& r : set.runs) {
                cols.push_back({column_name(r.name, "fidelity"), "Uhlmann fidelity to the product steady state, run " + r.name});
                cols.push_back({column_name(r.name, "max_connected"), "max connected correlation modulus, run " + r.name});
                cols.push_back({column_name(r.name, "residual"), "Frobenius norm of L[rho(t)], run " + r.name});
                if (sums)
                    for (const char* c : {"C++", "C--", "C+-", "C-+"}) {
                        cols.push_back({column_name(r.name, c) + "_re", std::string("Re sum_{j<k} Tr[rho_jk s^a_j s^b_k], ") + c});
                        cols.push_back({column_name(r.name, c) + "_im", std::string("Im sum_{j<k} Tr[rho_jk s^a_j s^b_k], ") + c});
                    }
            }
            const std::string stem = sums ? "figS1_" + std::string(1, panel) : "fig1" + std::string(1, panel);
            const auto csv = dir / (stem + ".csv");
            CsvWriter w(csv,
                        {"qsync " + std::string(QSYNC_VERSION) + " preset " + (sums ? std::string("figS1") : stem),
                         "runs: ghz/random = coupled register, *_free = same qubits without coupling"},
                        cols);
            for (std::size_t i = 0; i < set.times.size(); ++i) {
                std::vector<double> row{set.times[i]};
                for (const auto& r : set.runs) {
                    row.push_back(r.fidelity[i]);
                    row.push_back(r.max_connected[i]);
                    row.push_back(r.residual[i]);
                    if (sums)
                        for (const char* c : {"C++", "C--", "C+-", "C-+"}) {
                            row.push_back(r.sums[i].at(c).real());
                            row.push_back(r.sums[i].at(c).imag());
                        }
                }
                w.write_numbers(row);
            }
            json runs = json::array();
            for (const auto& r : set.runs)
                runs.push_back({{"name", r.name}, {"final_fidelity", r.fidelity.back()},
                                {"final_max_connected", r.max_connected.back()},
                                {"final_residual", r.residual.back()}, {"max_trace_error", r.max_trace_error},
                                {"min_eigenvalue", r.min_eigenvalue}});
            json details{{"preset", name}, {"spec", spec_to_json(spec)}, {"horizon", set.horizon},
                         {"time_grid", {{"t_min", to.t_min}, {"samples_per_decade", to.samples_per_decade},
                                        {"stop_rule", "all residuals below residual_tol"},
                                        {"residual_tol", to.residual_tol}}},
                         {"tolerances", {{"rtol", to.rtol}, {"atol", to.atol}}},
                         {"random_seed", to.seed}, {"runs", runs}};
            write_sidecar(sidecar_path(csv), opts.config_echo, details, seconds_since(tp));
            outcome.files.push_back(csv);
            outcome.summary[stem] = details;
        }
    };

    auto sweep_preset = [&](const SweepDefinition& def, json details) {
        const auto csv = dir / (name + ".csv");
        SweepRunOptions so;
        so.workers = opts.workers;
        so.csv_path = csv;
        so.comments = {"preset " + name};
        const SweepGrid grid = run_sweep(def, so);
        details["preset"] = name;
        details["sweep"] = sweep_summary(grid);
        write_sidecar(sidecar_path(csv), opts.config_echo, details, seconds_since(t0));
        outcome.files.push_back(csv);
        outcome.summary[name] = details;
    };

    if (name == "fig1b" || name == "fig1c") {
        trajectory_preset({name.back()}, false);
    } else if (name == "figS1") {
        trajectory_preset({'b', 'c'}, true);
    } else if (name == "fig2a") {
        const Overrides ov(opts.overrides, {"grid_points"});
        const int n = ov.integer("grid_points", 41, 1);
        const auto m = linspace(-1.0, 1.0, n);
        sweep_preset(fig2_definition({{"m1", m}, {"m2", m}}, false),
                     {{"u", 1.0}, {"delta", 0.0},
                      {"rate_convention", "m >= 0: gamma_gain = 1, gamma_damp = (1-m)/(1+m); m < 0: gamma_damp = 1, "
                                          "gamma_gain = (1+m)/(1-m)"}});
    } else if (name == "fig2b") {
        const Overrides ov(opts.overrides, {"delta_points", "delta_max", "u_points", "u_min", "u_max"});
        const int nd = ov.integer("delta_points", 21, 1);
        if (nd % 2 == 0) throw ConfigError("overrides.delta_points", "must be odd so that delta = 0 is on the grid");
        const double dmax = ov.number("delta_max", 5.0);
        const auto delta = linspace(-dmax, dmax, nd);
        const auto u = linspace(ov.number("u_min", 0.25), ov.number("u_max", 5.0), ov.integer("u_points", 20, 1));
        const SystemSpec ref = fig2_spec(0.25, -0.25, 1.0, 0.0);
        sweep_preset(fig2_definition({{"delta", delta}, {"u", u}}, true),
                     {{"m1", 0.25}, {"m2", -0.25}, {"resolved_qubits", spec_to_json(ref)["qubits"]},
                      {"coupling", "isotropic ux = uy = uz = u"}});
    } else if (name.size() == 5 && name.rfind("fig3", 0) == 0 && name[4] >= 'a' && name[4] <= 'd') {
        const Overrides ov(opts.overrides, {"grid_points"});
        const int n = ov.integer("grid_points", 11, 1);
        const char panel = name[4];
        const Fig3Panel p = fig3_panel(panel);
        json resolved = json::array();
        for (double m : linspace(-1.0, 1.0, n)) {
            const SystemSpec s = fig3_spec(panel, m, m);
            json env = json::array();
            for (std::size_t e = 2; e < 5; ++e)
                env.push_back({{"gamma_gain", s.qubits[e].gamma_gain}, {"gamma_damp", s.qubits[e].gamma_damp}});
            resolved.push_back({{"m", m}, {"gamma_gain", s.qubits[0].gamma_gain},
                                {"gamma_damp", s.qubits[0].gamma_damp}, {"environment_at_m_env", env}});
        }
        sweep_preset(fig3_definition(panel, n),
                     {{"topology", std::string(topology_name(p.topology))},
                      {"ux", p.ux}, {"uy", p.uy}, {"uz", p.uz},
                      {"environment_gain_multipliers", p.gain_mult},
                      {"environment_damp_multipliers", p.damp_mult},
                      {"rate_convention", "qubits 1-2: larger rate fixed to 1; qubits 3-5: multipliers x qubit 2 rates"},
                      {"resolved_rates", resolved}});
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    return outcome;
}

}  // namespace qsync
