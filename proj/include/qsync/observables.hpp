// observables.hpp: fidelity, expectations and inter-site correlations
#pragma once

#include "qsync/operator_algebra.hpp"

#include <map>
#include <string>
#include <tuple>

namespace qsync {

/// Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)) (not squared).
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Tr(rho op).
Complex expectation(const DensityMatrix& rho, const ComplexMatrix& op);

/// <A_j B_k> - <A_j><B_k> for local operators on a register with arbitrary local dims.
Complex connected_correlation(const DensityMatrix& rho, std::size_t j, const ComplexMatrix& a, std::size_t k,
                              const ComplexMatrix& b, std::span<const std::size_t> local_dims);

/// Qubit-register form with Pauli axes.
Complex connected_correlation(const DensityMatrix& rho, std::size_t j, std::size_t k, Axis alpha, Axis beta);

/// Largest |connected correlation| over all site pairs and the axis pairs
/// {x, y, z, plus, minus}², for qubit registers.
double max_connected_correlation(const DensityMatrix& rho);

struct CorrelationReport {
    // (j, k, alpha, beta) -> connected correlation
    std::map<std::tuple<std::size_t, std::size_t, Axis, Axis>, Complex> pair_connected;
    // "C++", "C--", "C+-", "C-+", "Cxx", "Cyy", "Cxy", "Cyx" -> sum over j<k of Tr[rho_jk s_j^a s_k^b]
    std::map<std::string, Complex> sums;
    // max deviation of the x/y sums from their expressions through r = C++ and s = C+-
    double redundancy_error = 0.0;
    // max |Tr[rho s_j^a s_k^b] - Tr[rho_jk s^a (x) s^b]| over pairs and axes
    double partial_trace_error = 0.0;
};

/// Summed two-site correlators for a qubit register. Throws std::invalid_argument
/// unless the dimension is a power of two.
CorrelationReport correlation_sums(const DensityMatrix& rho);

/// Number of qubits of a 2^n register; throws std::invalid_argument otherwise.
std::size_t qubit_count(const DensityMatrix& rho);

}  // namespace qsync
