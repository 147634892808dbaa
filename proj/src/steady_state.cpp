#include "qsync/liouvillian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <vector>

namespace qsync {

SteadyMethod parse_steady_method(std::string_view name) {
    if (name == "nullspace") return SteadyMethod::nullspace;
    if (name == "long_time") return SteadyMethod::long_time;
    if (name == "direct") return SteadyMethod::direct;
    throw std::invalid_argument("unknown steady-state method '" + std::string(name) + "'");
}

std::string_view steady_method_name(SteadyMethod m) {
    switch (m) {
        case SteadyMethod::nullspace: return "nullspace";
        case SteadyMethod::long_time: return "long_time";
        case SteadyMethod::direct: return "direct";
    }
    return "?";
}

SteadyMethod default_steady_method(Eigen::Index dim) {
    if (dim <= 16) return SteadyMethod::nullspace;
    if (dim <= 64) return SteadyMethod::direct;
    return SteadyMethod::long_time;
}

double default_steady_tolerance(SteadyMethod method) {
    switch (method) {
        case SteadyMethod::nullspace: return 1e-9;
        case SteadyMethod::long_time: return 1e-10;
        case SteadyMethod::direct: return 1e-9;
    }
    return 1e-9;
}

namespace {

double residual(const Liouvillian& liouv, const DensityMatrix& rho) { return liouv.apply(rho.matrix()).norm(); }

/// Reshapes a kernel vector into a unit-trace Hermitian state.
DensityMatrix normalize_kernel_vector(const ComplexVector& v, Eigen::Index d) {
    ComplexMatrix m = unvec(v, d);
    const Complex tr = m.trace();
    if (std::abs(tr) < 1e-12 * m.norm())
        throw SolverError("steady_state: kernel vector has vanishing trace (degenerate or defective kernel; "
                          "use the long_time method)");
    m /= tr;
    return DensityMatrix::repaired(m);
}

SteadyStateResult solve_nullspace(const Liouvillian& liouv, double tol) {
    const Eigen::Index d = liouv.dim();
    const ComplexMatrix super = liouv.representation() == Representation::explicit_superoperator
                                    ? liouv.superoperator()
                                    : build_superoperator(liouv);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(super, true);
    if (es.info() != Eigen::Success) throw SolverError("steady_state: eigendecomposition failed");
    const ComplexVector& ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);

    std::vector<Eigen::Index> kernel;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < tol * scale) kernel.push_back(i);
    if (kernel.empty())
        throw SolverError("steady_state: no eigenvalue within " + std::to_string(tol) + " x spectral scale of 0");
    std::sort(kernel.begin(), kernel.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev(a)) < std::abs(ev(b)); });

    // Prefer the smallest-|λ| vector with usable trace.
    std::optional<DensityMatrix> rho;
    for (auto idx : kernel) {
        try {
            rho = normalize_kernel_vector(es.eigenvectors().col(idx), d);
            break;
        } catch (const std::exception&) {
        }
    }
    if (!rho) throw SolverError("steady_state: no normalizable kernel vector; use the long_time method");

    SteadyStateResult out{*rho, residual(liouv, *rho), SteadyMethod::nullspace, kernel.size() > 1, kernel.size()};
    return out;
}

SteadyStateResult solve_direct(const Liouvillian& liouv, double tol) {
    const Eigen::Index d = liouv.dim();
    ComplexMatrix a = liouv.representation() == Representation::explicit_superoperator ? liouv.superoperator()
                                                                                        : build_superoperator(liouv);
    // The diagonal rows sum to zero (trace preservation), so one of them can be
    // traded for the normalization Tr ρ = 1.
    a.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) a(0, i * (d + 1)) = 1.0;
    ComplexVector b = ComplexVector::Zero(d * d);
    b(0) = 1.0;

    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const double rcond = lu.rcond();
    const ComplexVector x = lu.solve(b);
    if (!x.allFinite()) throw SolverError("steady_state: direct solve produced non-finite values");
    DensityMatrix rho = DensityMatrix::repaired(unvec(x, d));
    const double res = residual(liouv, rho);
    if (res > tol * liouv.rate_scale())
        throw SolverError("steady_state: direct residual " + std::to_string(res) + " above tolerance");
    return {std::move(rho), res, SteadyMethod::direct, rcond < 1e-13, 0};
}

SteadyStateResult solve_long_time(const Liouvillian& liouv, double tol) {
    const Eigen::Index d = liouv.dim();
    ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    EvolveOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-13;
    constexpr double horizon = 1e5;
    double t = 0.0, chunk = 1.0;
    while (true) {
        const double res = liouv.apply(hermitize(rho)).norm();
        if (res < tol) break;
        if (t >= horizon)
            throw SolverError("steady_state: long_time residual " + std::to_string(res) + " above " +
                              std::to_string(tol) + " at horizon t = " + std::to_string(horizon));
        const EvolutionTrace tr = evolve_from(liouv, rho, t, t + chunk, {}, opts);
        rho = tr.final_state / tr.final_state.trace();
        t += chunk;
        chunk = std::min(chunk * 2.0, 100.0);
    }
    DensityMatrix out = DensityMatrix::repaired(rho);
    return {out, residual(liouv, out), SteadyMethod::long_time, false, 0};
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& liouv, SteadyMethod method, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("steady_state: tolerance must be positive");
    switch (method) {
        case SteadyMethod::nullspace: return solve_nullspace(liouv, tol);
        case SteadyMethod::direct: return solve_direct(liouv, tol);
        case SteadyMethod::long_time: return solve_long_time(liouv, tol);
    }
    throw std::logic_error("steady_state: unhandled method");
}

SteadyStateResult steady_state(const Liouvillian& liouv) {
    const SteadyMethod m = default_steady_method(liouv.dim());
    return steady_state(liouv, m, default_steady_tolerance(m));
}

ComplexVector liouvillian_spectrum(const Liouvillian& liouv) {
    const ComplexMatrix super = liouv.representation() == Representation::explicit_superoperator
                                    ? liouv.superoperator()
                                    : build_superoperator(liouv);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(super, false);
    if (es.info() != Eigen::Success) throw SolverError("liouvillian_spectrum: eigendecomposition failed");
    return es.eigenvalues();
}

}  // namespace qsync
