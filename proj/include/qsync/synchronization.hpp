// synchronization.hpp: Husimi-Q phase-space functions and qubit phase-locking measures
//
// Spin coherent state |θ,φ> = e^{-iφσz/2} e^{-iθσy/2} |up>.
// Pair measure: S_jk(φ) = (π/16) |<σ_j^+ σ_k^->| cos(φ - φ0), φ0 = arg <σ_j^+ σ_k^->.
#pragma once

#include "qsync/model.hpp"
#include "qsync/operator_algebra.hpp"

#include <vector>

namespace qsync {

/// <θ,φ|ρ|θ,φ> / 2π for one qubit. θ ∈ [0, π], φ ∈ [0, 2π).
double husimi_q_single(const DensityMatrix& rho, double theta, double phi);

/// Product coherent-state element of a two-qubit state, divided by (2π)².
double husimi_q_pair(const DensityMatrix& rho_jk, double theta_j, double theta_k, double phi_j, double phi_k);

/// ¼(Re<σ+> cos φ + Im<σ+> sin φ).
double s_function_single(const DensityMatrix& rho, double phi);

/// <σ^+ ⊗ σ^-> of a two-qubit state.
Complex flip_flop(const DensityMatrix& rho_jk);

/// Closed-form relative-phase measure of a two-qubit state.
double s_rel_analytic(const DensityMatrix& rho_jk, double phi);

/// Same quantity by direct integration of the pair Husimi function:
/// -1/2π + ∫dφ2 ∫dθ1 ∫dθ2 sinθ1 sinθ2 Q(θ1, θ2, φ + φ2, φ2).
/// Gauss-Legendre in cos θ (n_theta nodes each), trapezoid in φ2 (n_phi nodes).
double s_rel_quadrature(const DensityMatrix& rho_jk, double phi, int n_theta = 64, int n_phi = 64);

struct TwoQubitAnalyticParams {
    double delta = 0.0;  // ω1 - ω2
    double u = 0.0;      // U^x = U^y
    double gamma1 = 0.0, gamma2 = 0.0;  // Γ_j = Γ_j^g + Γ_j^d
    double m1 = 0.0, m2 = 0.0;
    double gamma = 0.0;  // Γ1 + Γ2
};

/// Parameters for a two-qubit XXZ pair built from its qubits.
TwoQubitAnalyticParams two_qubit_params(const QubitParams& q1, const QubitParams& q2, double u);

/// Steady-state <σ1^+ σ2^-> of a dissipative XXZ qubit pair:
/// 4UΓ1Γ2(m1 - m2)(4Δ - iΓ) / (64Γ²U² + Γ1Γ2(Γ² + 16Δ²)).
Complex two_qubit_analytic(const TwoQubitAnalyticParams& p);

/// Phase convention: arg(c) in (-π, π], and 0 when |c| <= 1e-12.
double locked_phase(Complex flip_flop);

inline constexpr double kSMaxPerFlipFlop = 0.19634954084936207;  // π/16

struct PairSync {
    std::size_t j = 0, k = 0;
    double s_max = 0.0;
    double phi0 = 0.0;
    Complex flip_flop;
};

struct SyncReport {
    std::vector<PairSync> per_pair;  // all pairs j < k, row-major
    double total = 0.0;              // Σ s_max
};

SyncReport sync_report(const DensityMatrix& rho, const SystemSpec& spec);

}  // namespace qsync
