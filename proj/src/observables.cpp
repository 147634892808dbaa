#include "qsync/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace qsync {

namespace {

/// op_a on site j, op_b on site k, identity elsewhere.
ComplexMatrix two_site_op(const ComplexMatrix& a, std::size_t j, const ComplexMatrix& b, std::size_t k,
                          std::span<const std::size_t> dims) {
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (std::size_t l = 0; l < dims.size(); ++l) {
        const auto dl = static_cast<Eigen::Index>(dims[l]);
        out = kron(out, l == j ? a : (l == k ? b : ComplexMatrix::Identity(dl, dl)));
    }
    return out;
}

Complex trace_product(const ComplexMatrix& rho, const ComplexMatrix& op) {
    return (rho.array() * op.transpose().array()).sum();
}

}  // namespace

std::size_t qubit_count(const DensityMatrix& rho) {
    const auto d = static_cast<std::size_t>(rho.dim());
    if (!std::has_single_bit(d)) throw std::invalid_argument("qubit register expected (dimension " +
                                                              std::to_string(d) + " is not a power of two)");
    return static_cast<std::size_t>(std::countr_zero(d));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    const ComplexMatrix sa = herm_sqrt(a.matrix());
    const ComplexMatrix inner = hermitize(sa * b.matrix() * sa);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(inner, Eigen::EigenvaluesOnly).eigenvalues();
    // sqrt turns rounding noise of ~1e-16 on zero eigenvalues into ~1e-8, so cut at numerical rank
    const double cut = static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, ev.cwiseAbs().maxCoeff());
    double f = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cut) f += std::sqrt(ev(i));
    if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
    return f;
}

Complex expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
    if (op.rows() != rho.dim() || op.cols() != rho.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return trace_product(rho.matrix(), op);
}

Complex connected_correlation(const DensityMatrix& rho, std::size_t j, const ComplexMatrix& a, std::size_t k,
                              const ComplexMatrix& b, std::span<const std::size_t> local_dims) {
    if (j == k) throw std::invalid_argument("connected_correlation: requires j != k");
    if (hilbert_dim(local_dims) != static_cast<std::size_t>(rho.dim()))
        throw std::invalid_argument("connected_correlation: local dims do not match state");
    const Complex ab = expectation(rho, two_site_op(a, j, b, k, local_dims));
    const Complex ea = expectation(rho, embed(a, j, local_dims));
    const Complex eb = expectation(rho, embed(b, k, local_dims));
    return ab - ea * eb;
}

Complex connected_correlation(const DensityMatrix& rho, std::size_t j, std::size_t k, Axis alpha, Axis beta) {
    const LocalDims dims(qubit_count(rho), 2);
    return connected_correlation(rho, j, pauli(alpha), k, pauli(beta), dims);
}

double max_connected_correlation(const DensityMatrix& rho) {
    const std::size_t n = qubit_count(rho);
    const LocalDims dims(n, 2);
    constexpr Axis axes[] = {Axis::x, Axis::y, Axis::z, Axis::plus, Axis::minus};
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            for (Axis a : axes)
                for (Axis b : axes)
                    best = std::max(best, std::abs(connected_correlation(rho, j, pauli(a), k, pauli(b), dims)));
    return best;
}

CorrelationReport correlation_sums(const DensityMatrix& rho) {
    const std::size_t n = qubit_count(rho);
    const LocalDims dims(n, 2);
    struct Label {
        const char* name;
        Axis a, b;
    };
    constexpr Label labels[] = {
        {"C++", Axis::plus, Axis::plus}, {"C--", Axis::minus, Axis::minus}, {"C+-", Axis::plus, Axis::minus},
        {"C-+", Axis::minus, Axis::plus}, {"Cxx", Axis::x, Axis::x},        {"Cyy", Axis::y, Axis::y},
        {"Cxy", Axis::x, Axis::y},        {"Cyx", Axis::y, Axis::x},
    };

    CorrelationReport report;
    for (const auto& l : labels) report.sums[l.name] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const ComplexMatrix rho_jk = partial_trace(rho.matrix(), {j, k}, dims);
            for (const auto& l : labels) {
                const Complex full = expectation(rho, two_site_op(pauli(l.a), j, pauli(l.b), k, dims));
                const Complex reduced = trace_product(rho_jk, kron(pauli(l.a), pauli(l.b)));
                report.partial_trace_error = std::max(report.partial_trace_error, std::abs(full - reduced));
                report.sums[l.name] += full;
                const Complex ea = expectation(rho, embed(pauli(l.a), j, dims));
                const Complex eb = expectation(rho, embed(pauli(l.b), k, dims));
                report.pair_connected[{j, k, l.a, l.b}] = full - ea * eb;
            }
            report.pair_connected[{j, k, Axis::z, Axis::z}] =
                connected_correlation(rho, j, pauli(Axis::z), k, pauli(Axis::z), dims);
        }
    }

    const Complex r = report.sums["C++"], s = report.sums["C+-"];
    const Complex expected[] = {
        r + s + std::conj(s) + std::conj(r),          // Cxx
        -r + s + std::conj(s) - std::conj(r),         // Cyy
        kI * (-r + s - std::conj(s) + std::conj(r)),  // Cxy
        kI * (-r - s + std::conj(s) + std::conj(r)),  // Cyx
    };
    const char* names[] = {"Cxx", "Cyy", "Cxy", "Cyx"};
    for (int i = 0; i < 4; ++i)
        report.redundancy_error = std::max(report.redundancy_error, std::abs(report.sums[names[i]] - expected[i]));
    report.redundancy_error = std::max(report.redundancy_error, std::abs(report.sums["C-+"] - std::conj(s)));
    report.redundancy_error = std::max(report.redundancy_error, std::abs(report.sums["C--"] - std::conj(r)));
    return report;
}

}  // namespace qsync
