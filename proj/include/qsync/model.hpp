// model.hpp: declarative description of a dissipative qubit register
#pragma once

#include "qsync/operator_algebra.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsync {

/// Validation failure carrying the offending field path, e.g. "interactions[1]".
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field_path, const std::string& what)
        : std::invalid_argument(field_path + ": " + what), path_(std::move(field_path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct QubitParams {
    double omega = 0.0;
    double gamma_gain = 0.0;
    double gamma_damp = 0.0;
};

struct InteractionTerm {
    std::size_t j = 0;
    std::size_t k = 1;
    double ux = 0.0;
    double uy = 0.0;
    double uz = 0.0;
};

enum class Topology { all_to_all, one_to_all, custom };

Topology parse_topology(std::string_view name);
std::string_view topology_name(Topology t);

struct SystemSpec {
    std::vector<QubitParams> qubits;
    std::vector<InteractionTerm> interactions;
    Topology topology = Topology::custom;  // metadata only

    std::size_t size() const noexcept { return qubits.size(); }
    LocalDims local_dims() const { return LocalDims(qubits.size(), 2); }
    std::size_t dim() const { return std::size_t{1} << qubits.size(); }

    /// Throws SpecError naming the first offending field.
    void validate() const;
};

/// Expands a single coupling triple over the pair list implied by `topology`
/// (all pairs, or pairs (0,k) for one_to_all). custom yields no interactions.
SystemSpec make_spec(std::vector<QubitParams> qubits, double ux, double uy, double uz, Topology topology);

/// XXZ convenience: Ux = Uy = u.
inline SystemSpec make_xxz_spec(std::vector<QubitParams> qubits, double u, double uz, Topology topology) {
    return make_spec(std::move(qubits), u, u, uz, topology);
}

/// Single-qubit steady-state <sigma_z> = 1 - 2/(gain/damp + 1); +1 in the pure-gain limit.
double magnetization(double gamma_gain, double gamma_damp);

/// Rates realizing magnetization m with the larger rate pinned to `scale`:
/// gain = scale for m >= 0, damp = scale for m < 0.
QubitParams qubit_with_magnetization(double m, double omega = 0.0, double scale = 1.0);

ComplexMatrix build_hamiltonian(const SystemSpec& spec);

/// Tensor product of diag((1+m_j)/2, (1-m_j)/2).
DensityMatrix product_steady_state(const SystemSpec& spec);

struct StateInit {
    enum class Kind { ghz, random_pure, product_steady, explicit_matrix };
    Kind kind = Kind::ghz;
    std::uint64_t seed = 0;
    std::optional<DensityMatrix> matrix;  // present iff kind == explicit_matrix
};

StateInit::Kind parse_init_kind(std::string_view name);
std::string_view init_kind_name(StateInit::Kind kind);

/// Name of the generator behind random_pure (echoed into output metadata).
inline constexpr std::string_view kRandomStateGenerator = "mt19937_64 + Box-Muller complex normal";

DensityMatrix initial_state(const StateInit& init, const SystemSpec& spec);

/// Normalized complex standard-normal vector; identical on every platform for a given seed.
ComplexVector random_pure_vector(std::size_t dim, std::uint64_t seed);

}  // namespace qsync
