#include "qsync/operator_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsync {

Axis parse_axis(std::string_view name) {
    if (name == "x") return Axis::x;
    if (name == "y") return Axis::y;
    if (name == "z") return Axis::z;
    if (name == "plus" || name == "+") return Axis::plus;
    if (name == "minus" || name == "-") return Axis::minus;
    if (name == "identity" || name == "i") return Axis::identity;
    throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
}

std::string_view axis_name(Axis axis) {
    switch (axis) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
        case Axis::plus: return "plus";
        case Axis::minus: return "minus";
        case Axis::identity: return "identity";
    }
    return "?";
}

std::size_t hilbert_dim(std::span<const std::size_t> local_dims) {
    return std::accumulate(local_dims.begin(), local_dims.end(), std::size_t{1},
                           std::multiplies<>());
}

// ----------------------------------------------------------------------------

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols())
        throw std::invalid_argument("DensityMatrix: matrix must be square with dim >= 1");
    if (hermiticity_error(m_) > kHermitianTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian (max |rho - rho^dag| = " +
                                    std::to_string(hermiticity_error(m_)) + ")");
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    if (min_eigenvalue() < -kPsdTol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(min_eigenvalue()));
}

DensityMatrix DensityMatrix::repaired(const ComplexMatrix& m) {
    ComplexMatrix h = hermitize(m);
    const double tr = h.trace().real();
    if (!(std::abs(tr) > 0.0)) throw std::domain_error("DensityMatrix::repaired: zero trace");
    h /= tr;
    return DensityMatrix(std::move(h));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ----------------------------------------------------------------------------

ComplexMatrix pauli(Axis axis) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    switch (axis) {
        case Axis::x: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case Axis::y: m(0, 1) = -kI; m(1, 0) = kI; break;
        case Axis::z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        case Axis::plus: m(0, 1) = 1.0; break;   // |up><down|
        case Axis::minus: m(1, 0) = 1.0; break;  // |down><up|
        case Axis::identity: m.setIdentity(); break;
    }
    return m;
}

ComplexMatrix spin1_op(Axis axis) {
    const double s2 = std::sqrt(2.0);
    ComplexMatrix plus = ComplexMatrix::Zero(3, 3);
    plus(0, 1) = s2;
    plus(1, 2) = s2;
    const ComplexMatrix minus = plus.adjoint();
    switch (axis) {
        case Axis::x: return (plus + minus) / 2.0;
        case Axis::y: return (plus - minus) / (2.0 * kI);
        case Axis::z: {
            ComplexMatrix z = ComplexMatrix::Zero(3, 3);
            z(0, 0) = 1.0;
            z(2, 2) = -1.0;
            return z;
        }
        case Axis::plus: return plus;
        case Axis::minus: return minus;
        case Axis::identity: return ComplexMatrix::Identity(3, 3);
    }
    return plus;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::span<const std::size_t> local_dims) {
    if (site >= local_dims.size())
        throw std::out_of_range("embed: site " + std::to_string(site) + " out of range for " +
                                std::to_string(local_dims.size()) + " sites");
    if (op.rows() != static_cast<Eigen::Index>(local_dims[site]) || op.cols() != op.rows())
        throw std::invalid_argument("embed: operator dimension " + std::to_string(op.rows()) +
                                    " does not match local dimension " +
                                    std::to_string(local_dims[site]));
    const auto left = static_cast<Eigen::Index>(hilbert_dim(local_dims.first(site)));
    const auto right = static_cast<Eigen::Index>(hilbert_dim(local_dims.subspan(site + 1)));
    return kron(kron(ComplexMatrix::Identity(left, left), op), ComplexMatrix::Identity(right, right));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::vector<std::size_t> keep,
                            std::span<const std::size_t> local_dims) {
    const std::size_t n = local_dims.size();
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.back() >= n)
        throw std::out_of_range("partial_trace: site " + std::to_string(keep.back()) + " out of range");
    const auto full = static_cast<Eigen::Index>(hilbert_dim(local_dims));
    if (m.rows() != full || m.cols() != full)
        throw std::invalid_argument("partial_trace: matrix dimension does not match register");

    std::vector<bool> kept(n, false);
    for (auto s : keep) kept[s] = true;

    // Split every full index into (kept part, traced part), both row-major.
    std::size_t kept_dim = 1, traced_dim = 1;
    for (std::size_t s = 0; s < n; ++s) (kept[s] ? kept_dim : traced_dim) *= local_dims[s];

    std::vector<std::vector<Eigen::Index>> by_traced(traced_dim, std::vector<Eigen::Index>(kept_dim));
    for (Eigen::Index idx = 0; idx < full; ++idx) {
        std::size_t rem = static_cast<std::size_t>(idx);
        std::size_t k_idx = 0, t_idx = 0, k_stride = 1, t_stride = 1;
        for (std::size_t s = n; s-- > 0;) {
            const std::size_t digit = rem % local_dims[s];
            rem /= local_dims[s];
            if (kept[s]) { k_idx += digit * k_stride; k_stride *= local_dims[s]; }
            else { t_idx += digit * t_stride; t_stride *= local_dims[s]; }
        }
        by_traced[t_idx][k_idx] = idx;
    }

    const auto kd = static_cast<Eigen::Index>(kept_dim);
    ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
    for (const auto& pos : by_traced)
        for (Eigen::Index a = 0; a < kd; ++a)
            for (Eigen::Index b = 0; b < kd; ++b) out(a, b) += m(pos[a], pos[b]);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep,
                            std::span<const std::size_t> local_dims) {
    return DensityMatrix(partial_trace(rho.matrix(), std::move(keep), local_dims));
}

ComplexMatrix herm_sqrt(const ComplexMatrix& m) {
    if (hermiticity_error(m) > kHermitianTol)
        throw std::invalid_argument("herm_sqrt: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -kPsdTol)
            throw std::domain_error("herm_sqrt: eigenvalue " + std::to_string(ev(i)) +
                                    " below -1e-10 (input not PSD)");
        ev(i) = ev(i) < 0.0 ? 0.0 : std::sqrt(ev(i));
    }
    const auto& v = es.eigenvectors();
    return v * ev.asDiagonal() * v.adjoint();
}

double hermiticity_error(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

ComplexMatrix hermitize(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());  // Eigen storage is column-major
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
    if (v.size() != dim * dim) throw std::invalid_argument("unvec: size mismatch");
    return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

}  // namespace qsync
