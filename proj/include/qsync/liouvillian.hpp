// liouvillian.hpp: Lindblad generator, dynamics, steady states and the
// product-state residual identity for dissipative interacting qubits.
//
//   dρ/dt = -i[H, ρ] + Σ_c rate_c (c ρ c† - {c†c, ρ}/2)
//
// For a qubit register built from a SystemSpec the jump set is
// {σ_j^+ with rate Γ_j^g/2, σ_j^- with rate Γ_j^d/2}.
#pragma once

#include "qsync/dopri5.hpp"
#include "qsync/model.hpp"
#include "qsync/operator_algebra.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsync {

/// Numerical failure of a solver (steady state, integrator, closure check).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct JumpOperator {
    ComplexMatrix local_op;  // acts on one site
    std::size_t site = 0;
    double rate = 0.0;  // coefficient in front of D[c]
};

enum class Representation { matrix_free, explicit_superoperator };

/// Largest Hilbert dimension for which an explicit d²×d² superoperator is built.
inline constexpr std::size_t kDefaultSuperoperatorCap = 128;

class Liouvillian {
public:
    Liouvillian(ComplexMatrix hamiltonian, LocalDims local_dims, std::vector<JumpOperator> jumps);

    static Liouvillian from_spec(const SystemSpec& spec);

    Eigen::Index dim() const noexcept { return h_.rows(); }
    const ComplexMatrix& hamiltonian() const noexcept { return h_; }
    const LocalDims& local_dims() const noexcept { return dims_; }
    const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }
    const std::optional<SystemSpec>& spec() const noexcept { return spec_; }

    Representation representation() const noexcept {
        return super_ ? Representation::explicit_superoperator : Representation::matrix_free;
    }

    /// Builds and caches the explicit superoperator; apply() then uses it.
    void materialize(std::size_t max_dim = kDefaultSuperoperatorCap);
    const ComplexMatrix& superoperator() const;

    /// L[rho] using the current representation.
    ComplexMatrix apply(const ComplexMatrix& rho) const;
    /// L[rho] without the superoperator (also the oracle for it).
    void apply_matrix_free(const ComplexMatrix& rho, ComplexMatrix& out) const;
    /// Matrix-free L[rho] for Hermitian rho, using rho Heff† = (Heff rho)†.
    /// The anti-Hermitian part of a non-Hermitian input is ignored.
    void apply_hermitian(const ComplexMatrix& rho, ComplexMatrix& out) const;

    /// Σ rate_c ‖c‖² + ‖H‖ style bound used to scale tolerances.
    double rate_scale() const noexcept { return rate_scale_; }

private:
    using SparseMatrix = Eigen::SparseMatrix<Complex>;

    struct Entry {
        Eigen::Index row, col;
        Complex value;
    };
    void apply_heff(const ComplexMatrix& rho, ComplexMatrix& out) const;
    void add_jump_terms(const ComplexMatrix& rho, ComplexMatrix& out) const;

    ComplexMatrix h_;
    ComplexMatrix heff_;  // H - (i/2) Σ rate c†c
    std::optional<std::vector<Entry>> heff_entries_;  // kept when Heff is mostly zeros (XXZ couplings are)
    LocalDims dims_;
    std::vector<JumpOperator> jumps_;
    std::vector<std::vector<Entry>> jump_entries_;  // nonzeros of sqrt(rate) * embedded c
    std::optional<SystemSpec> spec_;
    std::optional<ComplexMatrix> super_;
    double rate_scale_ = 1.0;
};

ComplexMatrix apply_liouvillian(const Liouvillian& liouv, const ComplexMatrix& rho);

/// Column-stacking superoperator, vec(AXB) = (Bᵀ ⊗ A) vec(X).
ComplexMatrix build_superoperator(const Liouvillian& liouv, std::size_t max_dim = kDefaultSuperoperatorCap);

// ----------------------------------------------------------------------------
// Dynamics

struct NamedObservable {
    std::string name;
    std::function<Complex(const DensityMatrix&)> fn;
};

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    bool retain_states = false;
    std::vector<NamedObservable> observables;
    /// Pre-repair trace drift beyond this aborts the run.
    double max_trace_drift = 1e-6;
    /// First trial step (0: automatic); lets chunked runs continue at the last step size.
    double initial_step = 0.0;
};

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<DensityMatrix> states;                   // only with retain_states
    std::map<std::string, std::vector<Complex>> series;  // one entry per observable
    double max_trace_error = 0.0;                        // before repair
    double min_eigenvalue = 0.0;                         // before clamping, over all samples
    Dopri5Stats stats;
    ComplexMatrix final_state;  // unrepaired integrator state at t_end
};

/// Integrates from t = 0 to t_end, sampling (repaired) states at `sample_times`.
EvolutionTrace evolve(const Liouvillian& liouv, const DensityMatrix& rho0, double t_end,
                      const std::vector<double>& sample_times, const EvolveOptions& options = {});

/// Same, continuing from an unrepaired state at time t0 (samples must lie in [t0, t_end]).
EvolutionTrace evolve_from(const Liouvillian& liouv, const ComplexMatrix& rho0, double t0, double t_end,
                           const std::vector<double>& sample_times, const EvolveOptions& options = {});

// ----------------------------------------------------------------------------
// Steady states

enum class SteadyMethod {
    nullspace,  // full eigendecomposition of the superoperator
    long_time,  // integrate until ‖L[ρ]‖_F < tol
    direct,     // trace-constrained LU solve of the superoperator
};

SteadyMethod parse_steady_method(std::string_view name);
std::string_view steady_method_name(SteadyMethod m);

/// nullspace up to d = 16, direct up to d = 64, long_time beyond.
SteadyMethod default_steady_method(Eigen::Index dim);

/// Default tolerance per method: relative zero-eigenvalue threshold for
/// nullspace, absolute residual target for long_time and direct.
double default_steady_tolerance(SteadyMethod method);

struct SteadyStateResult {
    DensityMatrix rho_ss;
    double residual_norm = 0.0;  // ‖L[ρ_ss]‖_F
    SteadyMethod method = SteadyMethod::nullspace;
    bool degeneracy_flag = false;
    std::size_t kernel_dim = 0;  // 0 when the method does not measure it
};

SteadyStateResult steady_state(const Liouvillian& liouv, SteadyMethod method, double tol);
SteadyStateResult steady_state(const Liouvillian& liouv);

/// All eigenvalues of the explicit superoperator.
ComplexVector liouvillian_spectrum(const Liouvillian& liouv);

// ----------------------------------------------------------------------------
// Uniqueness certificate

/// Dimension of the associative algebra generated by `generators` under
/// multiplication and addition (vectorized span grown by products, re-orthonormalized
/// with rank tolerance 1e-10).
std::size_t algebra_closure_dim(const std::vector<ComplexMatrix>& generators, int max_iterations = 64);

/// Generators are the jump operators with nonzero rate and their adjoints
/// (plus H when requested). The steady state is certified unique when the
/// result equals d².
std::size_t algebra_closure_dim(const SystemSpec& spec, bool include_hamiltonian);

// ----------------------------------------------------------------------------
// Product-state residual

struct PairCoefficients {
    std::size_t j = 0, k = 0;
    double flip_flop = 0.0;   // (m_j - m_k)(U^x + U^y)
    double pair_flip = 0.0;   // (m_j + m_k)(U^x - U^y)
};

struct NogoResidual {
    double residual_norm = 0.0;              // ‖L[ρ0]‖_F
    std::vector<PairCoefficients> pairs;     // one entry per interaction term
    ComplexMatrix commutator;                // [U, ρ0] = -½ Σ (M_jk + U_jk) Π_{l≠j,k} ρ_l0
    ComplexMatrix liouvillian_image;         // L[ρ0] = -i [U, ρ0]
    double cross_check_error = 0.0;          // max |closed form - apply_liouvillian(ρ0)|
};

/// Closed-form L[ρ0] for the product state; throws SolverError if it disagrees
/// with the generator applied to ρ0 beyond 1e-12 (scaled by the coupling size).
NogoResidual nogo_residual(const SystemSpec& spec);

}  // namespace qsync
