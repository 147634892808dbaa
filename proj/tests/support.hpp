// Shared helpers for the test binaries: seeded random inputs and oracles
// written directly from the defining formulas, independent of the library's
// own construction paths.
#pragma once

#include "qsync/liouvillian.hpp"
#include "qsync/model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace qsync::testing {

inline ComplexMatrix ginibre(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k < d; ++k) g(i, k) = Complex(n(rng), n(rng));
    return g;
}

/// Full-rank random density matrix G G† / Tr.
inline DensityMatrix random_density(Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = ginibre(d, rng);
    ComplexMatrix r = g * g.adjoint();
    r /= r.trace();
    return DensityMatrix::repaired(r);
}

inline ComplexMatrix random_hermitian(Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = ginibre(d, rng);
    return (g + g.adjoint()) / 2.0;
}

/// Random dissipative spec with arbitrary XYZ couplings on every pair.
inline SystemSpec random_spec(std::size_t n, std::uint64_t seed, bool xxz = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rate(0.05, 3.0), w(-2.0, 2.0), u(-2.0, 2.0);
    SystemSpec s;
    for (std::size_t j = 0; j < n; ++j) s.qubits.push_back({w(rng), rate(rng), rate(rng)});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const double ux = u(rng);
            s.interactions.push_back({j, k, ux, xxz ? ux : u(rng), u(rng)});
        }
    return s;
}

// ---- oracle: the master equation written out term by term --------------

inline ComplexMatrix op2(char which) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    switch (which) {
        case 'x': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 'y': m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
        case 'z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        case '+': m(0, 1) = 1.0; break;  // |up><down|
        case '-': m(1, 0) = 1.0; break;
        default: m = ComplexMatrix::Identity(2, 2);
    }
    return m;
}

/// op on `site` of an n-qubit register, built as an explicit tensor product.
inline ComplexMatrix site_op(const ComplexMatrix& op, std::size_t site, std::size_t n) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (std::size_t s = 0; s < n; ++s) {
        const ComplexMatrix f = s == site ? op : ComplexMatrix::Identity(2, 2);
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index k = 0; k < out.cols(); ++k) next.block(2 * i, 2 * k, 2, 2) = out(i, k) * f;
        out = next;
    }
    return out;
}

inline ComplexMatrix oracle_hamiltonian(const SystemSpec& s) {
    const std::size_t n = s.size();
    const Eigen::Index d = Eigen::Index(1) << n;
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < n; ++j) h += 0.5 * s.qubits[j].omega * site_op(op2('z'), j, n);
    for (const auto& t : s.interactions) {
        h += t.ux * site_op(op2('x'), t.j, n) * site_op(op2('x'), t.k, n);
        h += t.uy * site_op(op2('y'), t.j, n) * site_op(op2('y'), t.k, n);
        h += t.uz * site_op(op2('z'), t.j, n) * site_op(op2('z'), t.k, n);
    }
    return h;
}

inline ComplexMatrix dissipator(const ComplexMatrix& c, const ComplexMatrix& rho) {
    const ComplexMatrix cdc = c.adjoint() * c;
    return c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
}

/// -i[H, rho] + sum_j (G^g_j/2) D[s+_j] + (G^d_j/2) D[s-_j].
inline ComplexMatrix oracle_lindblad(const SystemSpec& s, const ComplexMatrix& rho) {
    const ComplexMatrix h = oracle_hamiltonian(s);
    ComplexMatrix out = Complex(0, -1) * (h * rho - rho * h);
    for (std::size_t j = 0; j < s.size(); ++j) {
        out += 0.5 * s.qubits[j].gamma_gain * dissipator(site_op(op2('+'), j, s.size()), rho);
        out += 0.5 * s.qubits[j].gamma_damp * dissipator(site_op(op2('-'), j, s.size()), rho);
    }
    return out;
}

/// Magnetization m with the larger of the two rates fixed to 1.
inline QubitParams unit_rate_qubit(double m, double omega = 0.0) {
    if (m >= 0.0) return {omega, 1.0, (1.0 - m) / (1.0 + m)};
    return {omega, (1.0 + m) / (1.0 - m), 1.0};
}

}  // namespace qsync::testing
