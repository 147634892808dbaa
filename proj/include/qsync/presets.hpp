// presets.hpp: named experiments as runnable, parameterized jobs
//
//   fig1b, fig1c  fidelity to the product state for six all-to-all qubits,
//                 GHZ and random initial states, with and without coupling
//   figS1         the same runs (both parameter sets) with summed correlators
//   fig2a         two-qubit S_max over (m1, m2), isotropic U = 1, Δ = 0
//   fig2b         two-qubit S_max over (Δ, U) at m1 = -m2 = 1/4
//   fig3a..fig3d  five-qubit S_t^max over (m1, m_env), all-to-all vs one-to-all
#pragma once

#include "qsync/config.hpp"
#include "qsync/observables.hpp"
#include "qsync/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qsync {

std::vector<std::string> preset_names();

/// Six-qubit spec of fig1b ('b', identical ratios) or fig1c ('c'); coupling off when !interacting.
SystemSpec fig1_spec(char panel, bool interacting = true);

struct TrajectoryOptions {
    double t_min = 1e-3;
    int samples_per_decade = 10;
    double residual_tol = 1e-9;  // stop once every run has ‖L[ρ]‖_F below this
    double t_cap = 1e4;          // give up (SolverError) beyond this time
    // Explicit RK sits on its stability limit here (‖L‖ ~ 1e4), which keeps the stiff modes at
    // tolerance level: the residual floor is about 2e4 * rtol for fig1. 1e-14 puts it near 2e-10.
    double rtol = 1e-14;
    double atol = 1e-16;
    std::uint64_t seed = 0;  // random_pure initial state
    bool include_noninteracting = true;
    bool correlation_sums = false;
};

struct Trajectory {
    std::string name;  // ghz, random, ghz_free, random_free
    std::vector<double> fidelity;       // F[ρ(t), ρ0]
    std::vector<double> max_connected;  // max connected correlation modulus
    std::vector<double> residual;       // ‖L[ρ(t)]‖_F
    std::vector<std::map<std::string, Complex>> sums;  // only with correlation_sums
    DensityMatrix final_state{ComplexMatrix::Identity(1, 1)};
    double max_trace_error = 0.0;
    double min_eigenvalue = 0.0;
};

struct TrajectorySet {
    std::vector<double> times;  // log-spaced from t_min to the horizon
    std::vector<Trajectory> runs;
    double horizon = 0.0;
};

/// Evolves GHZ and seeded random states (and the uncoupled counterparts) in
/// lockstep over a logarithmic time grid until every residual is below tolerance.
TrajectorySet run_fidelity_trajectories(const SystemSpec& spec, const TrajectoryOptions& opts);

/// Two qubits with magnetizations set by the "larger rate = 1" convention, ω1 - ω2 = Δ,
/// isotropic coupling U.
SystemSpec fig2_spec(double m1, double m2, double u, double delta);

/// Five qubits of fig3a..fig3d (panel 'a'..'d'). Qubits 1 and 2 follow the "larger rate = 1"
/// convention for m1 and m_env; qubits 3-5 scale qubit 2's rates by the panel multipliers.
SystemSpec fig3_spec(char panel, double m1, double m_env);

/// Steady-state + analytic flip-flop sweep for fig2a / fig2b.
SweepDefinition fig2_definition(const std::vector<SweepAxis>& axes, bool delta_u_axes);

SweepDefinition fig3_definition(char panel, int grid_points);

/// Evenly spaced values, endpoints included.
std::vector<double> linspace(double a, double b, int n);

struct PresetOptions {
    std::filesystem::path out_dir = ".";
    unsigned workers = 1;
    std::uint64_t seed = 0;
    nlohmann::json overrides = nlohmann::json::object();
    nlohmann::json config_echo;  // canonical config, copied into sidecars
};

struct PresetOutcome {
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
};

/// Runs a preset and writes `<out_dir>/<name>*.csv` with JSON sidecars.
/// Throws ConfigError for unknown presets or overrides.
PresetOutcome run_preset(const std::string& name, const PresetOptions& opts);

}  // namespace qsync
