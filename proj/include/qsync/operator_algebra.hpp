// operator_algebra.hpp: dense complex operators on a register of qubits / spin-1 sites
//
// Basis conventions: site 0 is the leftmost (most significant) tensor factor.
// Qubit local basis is (|up>, |down>) with sigma_z|up> = +|up>; spin-1 local
// basis is (|1,1>, |1,0>, |1,-1>).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsync {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Axis { x, y, z, plus, minus, identity };

Axis parse_axis(std::string_view name);
std::string_view axis_name(Axis axis);

/// Local dimensions of every site of a register, e.g. {2,2,2} for three qubits.
using LocalDims = std::vector<std::size_t>;

std::size_t hilbert_dim(std::span<const std::size_t> local_dims);

// ----------------------------------------------------------------------------
// Tolerances shared by the density-matrix checks.

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

/// Hermitian, PSD, unit-trace matrix. Construction validates; use
/// `DensityMatrix::repaired` to Hermitize and renormalize integrator output first.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    /// (m + m^dagger)/2 scaled to unit trace, then validated.
    static DensityMatrix repaired(const ComplexMatrix& m);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    double purity() const;
    double min_eigenvalue() const;

private:
    ComplexMatrix m_;
};

/// Single-qubit operator in the (|up>, |down>) basis.
ComplexMatrix pauli(Axis axis);

/// Spin-1 angular momentum (hbar = 1); plus/minus are the ladder operators J+- = Jx +- iJy.
ComplexMatrix spin1_op(Axis axis);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// I (x) ... (x) op (x) ... (x) I with `op` on `site`.
ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::span<const std::size_t> local_dims);

/// Reduced matrix over `keep` (returned in ascending site order).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::vector<std::size_t> keep,
                            std::span<const std::size_t> local_dims);
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep,
                            std::span<const std::size_t> local_dims);

/// Hermitian PSD square root. Eigenvalues in [-1e-10, 0) are clamped to zero;
/// anything more negative throws std::domain_error.
ComplexMatrix herm_sqrt(const ComplexMatrix& m);

// Small helpers used across modules.
double hermiticity_error(const ComplexMatrix& m);
ComplexMatrix hermitize(const ComplexMatrix& m);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs(const ComplexMatrix& m);

/// Column-stacking vectorization and its inverse.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim);

}  // namespace qsync
