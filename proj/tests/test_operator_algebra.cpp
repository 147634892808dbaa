#include "qsync/operator_algebra.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace qsync;
using namespace qsync::testing;

namespace {

ComplexMatrix diag(std::initializer_list<double> v) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return d.asDiagonal();
}

const LocalDims q2{2, 2};
const LocalDims q3{2, 2, 2};

}  // namespace

TEST_CASE("pauli matrices in the (up, down) basis") {
    ComplexMatrix plus(2, 2);
    plus << 0, 1, 0, 0;
    CHECK(max_abs(pauli(Axis::plus) - plus) == 0.0);
    CHECK(max_abs(pauli(Axis::z) - diag({1, -1})) == 0.0);
    CHECK(max_abs(pauli(Axis::x) * pauli(Axis::x) - ComplexMatrix::Identity(2, 2)) == 0.0);
    // s+ = (sx + i sy)/2
    CHECK(max_abs(pauli(Axis::plus) - (pauli(Axis::x) + kI * pauli(Axis::y)) / 2.0) < 1e-15);
    CHECK(max_abs(pauli(Axis::minus) - pauli(Axis::plus).adjoint()) == 0.0);
    CHECK_THROWS_AS(parse_axis("w"), std::invalid_argument);
}

TEST_CASE("spin-1 operators") {
    CHECK(max_abs(spin1_op(Axis::z) - diag({1, 0, -1})) == 0.0);
    const ComplexMatrix c = commutator(spin1_op(Axis::x), spin1_op(Axis::y));
    CHECK(max_abs(c - kI * spin1_op(Axis::z)) < 1e-15);
    // J+|1,-1> = sqrt(1*2 - (-1)*0)|1,0> = sqrt2 |1,0>
    ComplexVector down = ComplexVector::Zero(3);
    down(2) = 1.0;
    const ComplexVector up = spin1_op(Axis::plus) * down;
    CHECK(std::abs(up(1) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(up(0)) + std::abs(up(2)) == 0.0);
    // J^2 = 2 I
    ComplexMatrix j2 = ComplexMatrix::Zero(3, 3);
    for (Axis a : {Axis::x, Axis::y, Axis::z}) j2 += spin1_op(a) * spin1_op(a);
    CHECK(max_abs(j2 - 2.0 * ComplexMatrix::Identity(3, 3)) < 1e-14);
}

TEST_CASE("kron") {
    CHECK(max_abs(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) - ComplexMatrix::Identity(4, 4)) == 0.0);
    CHECK(max_abs(kron(pauli(Axis::z), pauli(Axis::z)) - diag({1, -1, -1, 1})) == 0.0);
    const ComplexMatrix pm = kron(pauli(Axis::plus), pauli(Axis::minus));
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(1, 2) = 1.0;
    CHECK(max_abs(pm - expect) == 0.0);

    SUBCASE("associativity and the index formula") {
        std::mt19937_64 rng(11);
        const ComplexMatrix a = ginibre(2, rng), b = ginibre(3, rng), c = ginibre(2, rng);
        CHECK(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-14);
        const ComplexMatrix ab = kron(a, b);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) CHECK(ab(i * 3 + k, j * 3 + l) == a(i, j) * b(k, l));
    }
}

TEST_CASE("embed") {
    CHECK(max_abs(embed(pauli(Axis::z), 0, q2) - diag({1, 1, -1, -1})) == 0.0);
    CHECK(max_abs(embed(pauli(Axis::z), 1, q2) - diag({1, -1, 1, -1})) == 0.0);
    // |up down up> is basis index 0b010 = 2; s+ on site 1 raises to |up up up> = 0
    ComplexVector v = ComplexVector::Zero(8);
    v(2) = 1.0;
    const ComplexVector w = embed(pauli(Axis::plus), 1, q3) * v;
    ComplexVector expect = ComplexVector::Zero(8);
    expect(0) = 1.0;
    CHECK((w - expect).norm() == 0.0);

    CHECK_THROWS_AS(embed(pauli(Axis::z), 3, q3), std::out_of_range);
    CHECK_THROWS_AS(embed(spin1_op(Axis::z), 0, q3), std::invalid_argument);

    SUBCASE("operators on distinct sites commute") {
        std::mt19937_64 rng(5);
        const LocalDims mixed{2, 3, 2};
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix a = ginibre(2, rng), b = ginibre(3, rng), c = ginibre(2, rng);
            const ComplexMatrix ea = embed(a, 0, mixed), eb = embed(b, 1, mixed), ec = embed(c, 2, mixed);
            CHECK(max_abs(ea * eb - eb * ea) < 1e-13);
            CHECK(max_abs(ea * ec - ec * ea) < 1e-13);
            CHECK(max_abs(eb * ec - ec * eb) < 1e-13);
        }
    }
}

TEST_CASE("partial trace") {
    const DensityMatrix a = random_density(2, 1), b = random_density(3, 2);
    const DensityMatrix ab(kron(a.matrix(), b.matrix()));
    const LocalDims dims{2, 3};
    CHECK(max_abs(partial_trace(ab, {0}, dims).matrix() - a.matrix()) < 1e-14);
    CHECK(max_abs(partial_trace(ab, {1}, dims).matrix() - b.matrix()) < 1e-14);

    // GHZ on three qubits: keep {0,1} leaves (|00><00| + |11><11|)/2
    ComplexMatrix ghz = ComplexMatrix::Zero(8, 8);
    ghz(0, 0) = ghz(0, 7) = ghz(7, 0) = ghz(7, 7) = 0.5;
    CHECK(max_abs(partial_trace(DensityMatrix(ghz), {0, 1}, q3).matrix() - diag({0.5, 0, 0, 0.5})) < 1e-15);

    CHECK_THROWS_AS(partial_trace(ab, {}, dims), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(ab, {2}, dims), std::out_of_range);

    SUBCASE("composition, Hermiticity and trace") {
        const LocalDims dims4{2, 2, 3, 2};
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const DensityMatrix r = random_density(24, 100 + seed);
            // drop site 3 then site 1 (which is now index 1 of {0,1,2}) versus both at once
            const DensityMatrix step = partial_trace(r, {0, 1, 2}, dims4);
            const DensityMatrix seq = partial_trace(step, {0, 2}, LocalDims{2, 2, 3});
            const DensityMatrix joint = partial_trace(r, {0, 2}, dims4);
            CHECK(max_abs(seq.matrix() - joint.matrix()) < 1e-13);
            CHECK(hermiticity_error(joint.matrix()) < 1e-14);
            CHECK(std::abs(joint.matrix().trace() - Complex(1.0)) < 1e-13);
        }
    }
}

TEST_CASE("herm_sqrt") {
    CHECK(max_abs(herm_sqrt(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)) < 1e-15);
    CHECK(max_abs(herm_sqrt(diag({4, 9})) - diag({2, 3})) < 1e-14);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        const ComplexMatrix g = ginibre(6, rng);
        const ComplexMatrix m = g * g.adjoint();
        const ComplexMatrix s = herm_sqrt(m);
        CHECK(hermiticity_error(s) < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(s).eigenvalues().minCoeff() > -1e-12);
        CHECK(max_abs(s * s - m) < 1e-10 * std::max(1.0, max_abs(m)));
    }
    CHECK_THROWS_AS(herm_sqrt(diag({1, -1e-6})), std::domain_error);
    CHECK_NOTHROW(herm_sqrt(diag({1, -1e-12})));
    ComplexMatrix nh = ComplexMatrix::Zero(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(herm_sqrt(nh), std::invalid_argument);
}

TEST_CASE("DensityMatrix validation") {
    CHECK_THROWS_AS(DensityMatrix(diag({0.5, 0.6})), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(diag({1.5, -0.5})), std::invalid_argument);
    ComplexMatrix nh = diag({0.5, 0.5});
    nh(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{nh}, std::invalid_argument);
    CHECK_NOTHROW(DensityMatrix::repaired(nh));
    CHECK(DensityMatrix(diag({0.5, 0.5})).purity() == doctest::Approx(0.5));
}

TEST_CASE("vec / unvec column stacking") {
    std::mt19937_64 rng(3);
    const ComplexMatrix a = ginibre(3, rng), x = ginibre(3, rng), b = ginibre(3, rng);
    CHECK((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm() < 1e-12);
    CHECK(max_abs(unvec(vec(x), 3) - x) == 0.0);
    CHECK(vec(x)(1) == x(1, 0));
}
