// config.hpp: JSON run configuration for the qsync command-line tool
#pragma once

#include "qsync/liouvillian.hpp"
#include "qsync/model.hpp"
#include "qsync/spin1.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsync {

/// Malformed or invalid configuration; `path()` names the offending field (e.g. "spec.interactions[1]").
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field_path, const std::string& what)
        : std::invalid_argument((field_path.empty() ? std::string() : field_path + ": ") + what),
          path_(std::move(field_path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class Command { evolve, steady, sync, sweep, verify_nogo, spin1_check, algebra_check, preset };

Command parse_command(std::string_view name);
std::string_view command_name(Command c);

struct SweepAxis {
    std::string param;  // e.g. "delta", "u", "qubits[0].m", "interactions[2].uz"
    std::vector<double> values;
};

struct RunConfig {
    Command command = Command::steady;
    std::optional<std::string> preset;
    nlohmann::json overrides = nlohmann::json::object();  // preset parameter overrides

    std::optional<SystemSpec> spec;  // required by every non-preset qubit command
    StateInit init;

    // evolve
    double t_end = 10.0;
    int samples = 101;
    bool log_time = false;
    double t_min = 1e-3;  // first sample when log_time
    bool correlation_sums = false;
    double rtol = 1e-8;
    double atol = 1e-10;

    // steady / sync / sweep
    std::optional<SteadyMethod> steady_method;  // default depends on dimension
    std::optional<double> steady_tol;

    // sweep
    std::vector<SweepAxis> axes;
    std::optional<std::size_t> max_points;  // stop after this many rows (testing interrupted runs)

    // spin1-check
    Spin1Spec spin1;
    DissipationScheme spin1_scheme = DissipationScheme::side_to_center;

    // verify-nogo: "auto" derives the expectation from the pair coefficients
    std::string expect = "auto";

    std::string output_path;  // empty: derived from command / preset name
    unsigned workers = 1;

    /// Canonical JSON form; parse_config(to_json()) reproduces the config.
    nlohmann::json to_json() const;
};

/// Parses and validates a configuration document. A sidecar written by qsync
/// (an object with "qsync_sidecar": true) is accepted and its embedded config used.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies one sweep coordinate to a spec. Throws ConfigError for unknown paths.
void apply_sweep_param(SystemSpec& spec, const std::string& param, double value);

/// Checks that `param` names an existing parameter of `spec`.
void validate_sweep_param(const SystemSpec& spec, const std::string& param, const std::string& field_path);

nlohmann::json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace qsync
