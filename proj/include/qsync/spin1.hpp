// spin1.hpp: two dissipative spin-1 sites with XYZ coupling
//
// H = Σ_j (ω_j/2) J_j^z + Σ_α U^α J_1^α J_2^α, dissipators ½ γ D[c] per jump.
// Two jump schemes are provided:
//   j_ladder        J^+ with γ^g, J^- with γ^d
//   side_to_center  |1,0><1,-1| with γ^g, |1,0><1,1| with γ^d
//                   (both side states relax into |1,0>)
#pragma once

#include "qsync/liouvillian.hpp"

#include <string_view>
#include <vector>

namespace qsync {

enum class DissipationScheme { j_ladder, side_to_center };

DissipationScheme parse_dissipation_scheme(std::string_view name);
std::string_view dissipation_scheme_name(DissipationScheme s);

struct Spin1Spec {
    std::vector<double> omegas{0.0, 0.0};
    std::vector<double> gamma_gain{1.0, 1.0};
    std::vector<double> gamma_damp{1.0, 1.0};
    double ux = 0.0, uy = 0.0, uz = 0.0;

    /// Exactly two sites, non-negative rates; throws SpecError.
    void validate() const;
};

/// |1,0><1,0|.
DensityMatrix spin1_limit_cycle();

/// Jump operators of one site under `scheme` (rates already include the ½).
std::vector<JumpOperator> spin1_jumps(DissipationScheme scheme, std::size_t site, double gamma_gain,
                                      double gamma_damp);

/// Σ_α U^α J_1^α J_2^α.
ComplexMatrix spin1_interaction(double ux, double uy, double uz);

/// [U, ρ_LC ⊗ ρ_LC] with the standard (ħ = 1) angular momentum matrices.
ComplexMatrix spin1_interaction_commutator(double ux, double uy, double uz);

/// The same commutator in the normalization of the reference 9×9 table:
/// -2 [U, ρ_LC ⊗ ρ_LC]. Nonzero entries sit in row and column 4 only:
/// (0,4) = (8,4) = U^y - U^x, (2,4) = (6,4) = -(U^x + U^y), row 4 the negated transpose.
ComplexMatrix spin1_commutator(double ux, double uy, double uz);

Liouvillian spin1_liouvillian(const Spin1Spec& spec, DissipationScheme scheme);

SteadyStateResult spin1_steady_state(const Spin1Spec& spec, DissipationScheme scheme);

/// Largest |<A_1 B_2> - <A_1><B_2>| over A, B ∈ {Jx, Jy, Jz, J+, J-}.
double spin1_max_connected_correlation(const DensityMatrix& rho);

}  // namespace qsync
