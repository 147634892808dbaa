#include "qsync/observables.hpp"
#include "qsync/spin1.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace qsync;
using namespace qsync::testing;

namespace {

/// Reference 9x9 pattern: only column 4 and row 4 are populated.
ComplexMatrix reference_pattern(double ux, double uy) {
    ComplexMatrix m = ComplexMatrix::Zero(9, 9);
    m(0, 4) = m(8, 4) = uy - ux;
    m(2, 4) = m(6, 4) = -(ux + uy);
    m(4, 0) = m(4, 8) = ux - uy;
    m(4, 2) = m(4, 6) = ux + uy;
    return m;
}

ComplexMatrix lc_pair() {
    const ComplexMatrix lc = spin1_limit_cycle().matrix();
    return kron(lc, lc);
}

}  // namespace

TEST_CASE("limit cycle state") {
    const DensityMatrix lc = spin1_limit_cycle();
    CHECK(std::abs(lc.matrix().trace() - 1.0) == 0.0);
    CHECK(lc.purity() == 1.0);
    CHECK(std::abs(expectation(lc, spin1_op(Axis::z))) == 0.0);

    // single-site dissipator with side-to-center jumps annihilates it
    const Liouvillian one(ComplexMatrix::Zero(3, 3), {3}, spin1_jumps(DissipationScheme::side_to_center, 0, 0.7, 1.9));
    CHECK(max_abs(one.apply(lc.matrix())) == 0.0);
    // ladder jumps do not
    const Liouvillian ladder(ComplexMatrix::Zero(3, 3), {3}, spin1_jumps(DissipationScheme::j_ladder, 0, 0.7, 1.9));
    CHECK(max_abs(ladder.apply(lc.matrix())) > 0.1);
}

TEST_CASE("jump operators") {
    const auto s2c = spin1_jumps(DissipationScheme::side_to_center, 1, 2.0, 6.0);
    REQUIRE(s2c.size() == 2);
    // |1,0><1,-1| with gain/2, |1,0><1,1| with damp/2
    CHECK(s2c[0].local_op(1, 2) == Complex(1.0));
    CHECK(s2c[0].rate == 1.0);
    CHECK(s2c[1].local_op(1, 0) == Complex(1.0));
    CHECK(s2c[1].rate == 3.0);
    CHECK(s2c[0].site == 1);
    const auto lad = spin1_jumps(DissipationScheme::j_ladder, 0, 2.0, 6.0);
    CHECK(max_abs(lad[0].local_op - spin1_op(Axis::plus)) == 0.0);
    CHECK(max_abs(lad[1].local_op - spin1_op(Axis::minus)) == 0.0);
    CHECK(parse_dissipation_scheme("j_ladder") == DissipationScheme::j_ladder);
    CHECK_THROWS_AS(parse_dissipation_scheme("other"), std::invalid_argument);
}

TEST_CASE("commutator with the limit-cycle product") {
    // Ux = Uy = 1: (2,4) = -2, (0,4) = 0, (4,0) = 0, (4,2) = +2
    const ComplexMatrix c = spin1_commutator(1, 1, 0);
    CHECK(std::abs(c(2, 4) - Complex(-2.0)) < 1e-15);
    CHECK(std::abs(c(0, 4)) < 1e-15);
    CHECK(std::abs(c(4, 0)) < 1e-15);
    CHECK(std::abs(c(4, 2) - Complex(2.0)) < 1e-15);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 5; ++i) {
        const double ux = u(rng), uy = u(rng), uz = u(rng);
        const ComplexMatrix got = spin1_commutator(ux, uy, uz);
        CHECK(max_abs(got - reference_pattern(ux, uy)) < 1e-14);
        CHECK(max_abs(got + got.adjoint()) < 1e-14);
        // physical commutator computed here from the angular momentum matrices
        const ComplexMatrix h = ux * kron(spin1_op(Axis::x), spin1_op(Axis::x)) +
                                uy * kron(spin1_op(Axis::y), spin1_op(Axis::y)) +
                                uz * kron(spin1_op(Axis::z), spin1_op(Axis::z));
        const ComplexMatrix phys = h * lc_pair() - lc_pair() * h;
        CHECK(max_abs(spin1_interaction_commutator(ux, uy, uz) - phys) < 1e-14);
        CHECK(max_abs(got + 2.0 * phys) < 1e-14);
        CHECK(max_abs(spin1_commutator(ux, uy, 0.0) - got) < 1e-14);
    }
}

TEST_CASE("commutator vanishes exactly when Ux = Uy = 0") {
    const std::vector<double> grid{-2.0, -0.5, 0.0, 0.5, 2.0};
    for (double ux : grid)
        for (double uy : grid)
            for (double uz : {-1.0, 0.0, 3.0}) {
                const double n = max_abs(spin1_commutator(ux, uy, uz));
                if (ux == 0.0 && uy == 0.0)
                    CHECK(n == 0.0);
                else
                    CHECK(n > 0.1);
            }
}

TEST_CASE("spin-1 steady states") {
    Spin1Spec s;
    s.gamma_gain = {1.0, 2.0};
    s.gamma_damp = {1.5, 0.5};
    SUBCASE("uncoupled side-to-center relaxes to the limit-cycle product") {
        const auto ss = spin1_steady_state(s, DissipationScheme::side_to_center);
        CHECK(max_abs(ss.rho_ss.matrix() - lc_pair()) < 1e-10);
        CHECK(ss.kernel_dim == 1);
    }
    SUBCASE("coupled side-to-center develops correlations") {
        s.ux = s.uy = 1.0;
        const auto ss = spin1_steady_state(s, DissipationScheme::side_to_center);
        CHECK(ss.residual_norm < 1e-9);
        CHECK(spin1_max_connected_correlation(ss.rho_ss) >= 1e-4);
        CHECK(fidelity(ss.rho_ss, DensityMatrix(lc_pair())) < 0.999);
    }
    SUBCASE("pure ladder damping ends in the bottom state") {
        s.gamma_gain = {0.0, 0.0};
        const auto ss = spin1_steady_state(s, DissipationScheme::j_ladder);
        ComplexMatrix bottom = ComplexMatrix::Zero(9, 9);
        bottom(8, 8) = 1.0;
        CHECK(max_abs(ss.rho_ss.matrix() - bottom) < 1e-10);
        // long-time evolution from the limit-cycle product agrees
        const Liouvillian l = spin1_liouvillian(s, DissipationScheme::j_ladder);
        const auto tr = evolve(l, DensityMatrix(lc_pair()), 60.0, {60.0});
        CHECK(max_abs(tr.final_state - bottom) < 1e-8);
    }
    SUBCASE("validation") {
        s.omegas = {0.0};
        CHECK_THROWS_AS(s.validate(), SpecError);
        s.omegas = {0.0, 0.0};
        s.gamma_damp = {-1.0, 1.0};
        CHECK_THROWS_AS(spin1_steady_state(s, DissipationScheme::j_ladder), SpecError);
    }
}
