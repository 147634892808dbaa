#include "qsync/spin1.hpp"

#include "qsync/observables.hpp"

#include <algorithm>
#include <cmath>

namespace qsync {

namespace {

const LocalDims kSpin1Pair{3, 3};

ComplexMatrix basis_op(Eigen::Index row, Eigen::Index col) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(row, col) = 1.0;
    return m;
}

}  // namespace

DissipationScheme parse_dissipation_scheme(std::string_view name) {
    if (name == "j_ladder") return DissipationScheme::j_ladder;
    if (name == "side_to_center") return DissipationScheme::side_to_center;
    throw std::invalid_argument("unknown dissipation scheme '" + std::string(name) + "'");
}

std::string_view dissipation_scheme_name(DissipationScheme s) {
    return s == DissipationScheme::j_ladder ? "j_ladder" : "side_to_center";
}

void Spin1Spec::validate() const {
    if (omegas.size() != 2) throw SpecError("omegas", "exactly two spin-1 sites required");
    if (gamma_gain.size() != 2) throw SpecError("gamma_gain", "exactly two spin-1 sites required");
    if (gamma_damp.size() != 2) throw SpecError("gamma_damp", "exactly two spin-1 sites required");
    for (std::size_t j = 0; j < 2; ++j) {
        if (!(gamma_gain[j] >= 0.0)) throw SpecError("gamma_gain[" + std::to_string(j) + "]", "must be >= 0");
        if (!(gamma_damp[j] >= 0.0)) throw SpecError("gamma_damp[" + std::to_string(j) + "]", "must be >= 0");
        if (!std::isfinite(omegas[j])) throw SpecError("omegas[" + std::to_string(j) + "]", "must be finite");
    }
    if (!std::isfinite(ux) || !std::isfinite(uy) || !std::isfinite(uz))
        throw SpecError("u", "couplings must be finite");
}

DensityMatrix spin1_limit_cycle() { return DensityMatrix(basis_op(1, 1)); }

std::vector<JumpOperator> spin1_jumps(DissipationScheme scheme, std::size_t site, double gamma_gain,
                                      double gamma_damp) {
    if (scheme == DissipationScheme::j_ladder)
        return {{spin1_op(Axis::plus), site, gamma_gain / 2.0}, {spin1_op(Axis::minus), site, gamma_damp / 2.0}};
    // |1,-1> -> |1,0> raises m, |1,1> -> |1,0> lowers it
    return {{basis_op(1, 2), site, gamma_gain / 2.0}, {basis_op(1, 0), site, gamma_damp / 2.0}};
}

ComplexMatrix spin1_interaction(double ux, double uy, double uz) {
    ComplexMatrix u = ComplexMatrix::Zero(9, 9);
    const std::pair<Axis, double> terms[] = {{Axis::x, ux}, {Axis::y, uy}, {Axis::z, uz}};
    for (const auto& [axis, c] : terms)
        if (c != 0.0) u += c * kron(spin1_op(axis), spin1_op(axis));
    return u;
}

ComplexMatrix spin1_interaction_commutator(double ux, double uy, double uz) {
    const ComplexMatrix lc = spin1_limit_cycle().matrix();
    return commutator(spin1_interaction(ux, uy, uz), kron(lc, lc));
}

ComplexMatrix spin1_commutator(double ux, double uy, double uz) {
    return -2.0 * spin1_interaction_commutator(ux, uy, uz);
}

Liouvillian spin1_liouvillian(const Spin1Spec& spec, DissipationScheme scheme) {
    spec.validate();
    ComplexMatrix h = spin1_interaction(spec.ux, spec.uy, spec.uz);
    for (std::size_t j = 0; j < 2; ++j) h += (spec.omegas[j] / 2.0) * embed(spin1_op(Axis::z), j, kSpin1Pair);
    std::vector<JumpOperator> jumps;
    for (std::size_t j = 0; j < 2; ++j) {
        auto site = spin1_jumps(scheme, j, spec.gamma_gain[j], spec.gamma_damp[j]);
        jumps.insert(jumps.end(), site.begin(), site.end());
    }
    return Liouvillian(std::move(h), kSpin1Pair, std::move(jumps));
}

SteadyStateResult spin1_steady_state(const Spin1Spec& spec, DissipationScheme scheme) {
    Liouvillian l = spin1_liouvillian(spec, scheme);
    l.materialize();
    return steady_state(l, SteadyMethod::nullspace, default_steady_tolerance(SteadyMethod::nullspace));
}

double spin1_max_connected_correlation(const DensityMatrix& rho) {
    if (rho.dim() != 9) throw std::invalid_argument("spin1_max_connected_correlation: expected dimension 9");
    constexpr Axis axes[] = {Axis::x, Axis::y, Axis::z, Axis::plus, Axis::minus};
    double best = 0.0;
    for (Axis a : axes)
        for (Axis b : axes)
            best = std::max(best, std::abs(connected_correlation(rho, 0, spin1_op(a), 1, spin1_op(b), kSpin1Pair)));
    return best;
}

}  // namespace qsync
