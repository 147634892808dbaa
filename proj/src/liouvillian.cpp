#include "qsync/liouvillian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qsync {

Liouvillian::Liouvillian(ComplexMatrix hamiltonian, LocalDims local_dims, std::vector<JumpOperator> jumps)
    : h_(std::move(hamiltonian)), dims_(std::move(local_dims)), jumps_(std::move(jumps)) {
    const auto d = static_cast<Eigen::Index>(hilbert_dim(dims_));
    if (h_.rows() != d || h_.cols() != d)
        throw std::invalid_argument("Liouvillian: Hamiltonian dimension does not match register");
    if (hermiticity_error(h_) > 1e-12 * std::max(1.0, max_abs(h_)))
        throw std::invalid_argument("Liouvillian: Hamiltonian is not Hermitian");

    heff_ = h_;
    double scale = max_abs(h_);
    for (const auto& jump : jumps_) {
        if (jump.rate < 0.0) throw std::invalid_argument("Liouvillian: negative jump rate");
        if (jump.rate == 0.0) continue;
        const ComplexMatrix c = embed(jump.local_op, jump.site, dims_);
        heff_ -= (kI * (jump.rate / 2.0)) * (c.adjoint() * c);
        std::vector<Entry> entries;
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row)
                if (c(row, col) != Complex(0.0)) entries.push_back({row, col, std::sqrt(jump.rate) * c(row, col)});
        jump_entries_.push_back(std::move(entries));
        scale += jump.rate * max_abs(c.adjoint() * c);
    }
    rate_scale_ = std::max(1.0, scale);
    if ((heff_.array() != Complex(0.0)).count() * 4 <= d * d) {
        heff_entries_.emplace();
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row)
                if (heff_(row, col) != Complex(0.0)) heff_entries_->push_back({row, col, heff_(row, col)});
    }
}

Liouvillian Liouvillian::from_spec(const SystemSpec& spec) {
    spec.validate();
    std::vector<JumpOperator> jumps;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        jumps.push_back({pauli(Axis::plus), j, spec.qubits[j].gamma_gain / 2.0});
        jumps.push_back({pauli(Axis::minus), j, spec.qubits[j].gamma_damp / 2.0});
    }
    Liouvillian l(build_hamiltonian(spec), spec.local_dims(), std::move(jumps));
    l.spec_ = spec;
    return l;
}

namespace {

// plain complex product; std::complex operator* goes through the NaN-recovering libgcc routine
inline Complex mul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void Liouvillian::apply_heff(const ComplexMatrix& rho, ComplexMatrix& out) const {
    if (!heff_entries_) {
        out.noalias() = (-kI) * (heff_ * rho);
        return;
    }
    out.setZero(dim(), dim());
    for (Eigen::Index c = 0; c < dim(); ++c)
        for (const Entry& e : *heff_entries_) out(e.row, c) += mul(e.value, rho(e.col, c));
    out *= -kI;
}

void Liouvillian::add_jump_terms(const ComplexMatrix& rho, ComplexMatrix& out) const {
    // c rho c† entry by entry: embedded local jumps have a handful of nonzeros per column
    for (const auto& entries : jump_entries_)
        for (const Entry& b : entries) {
            const Complex cb = std::conj(b.value);
            for (const Entry& a : entries) out(a.row, b.row) += mul(mul(a.value, cb), rho(a.col, b.col));
        }
}

void Liouvillian::apply_matrix_free(const ComplexMatrix& rho, ComplexMatrix& out) const {
    if (rho.rows() != dim() || rho.cols() != dim())
        throw std::invalid_argument("apply_liouvillian: dimension mismatch (" + std::to_string(rho.rows()) +
                                    " vs " + std::to_string(dim()) + ")");
    apply_heff(rho, out);
    // -i Heff rho + i rho Heff† = -i Heff rho + (-i Heff rho†)†
    ComplexMatrix right(dim(), dim());
    apply_heff(rho.adjoint(), right);
    out += right.adjoint();
    add_jump_terms(rho, out);
}

void Liouvillian::apply_hermitian(const ComplexMatrix& rho, ComplexMatrix& out) const {
    if (rho.rows() != dim() || rho.cols() != dim())
        throw std::invalid_argument("apply_liouvillian: dimension mismatch");
    apply_heff(rho, out);
    out += out.adjoint().eval();
    add_jump_terms(rho, out);
}

ComplexMatrix Liouvillian::apply(const ComplexMatrix& rho) const {
    if (super_) {
        if (rho.rows() != dim() || rho.cols() != dim())
            throw std::invalid_argument("apply_liouvillian: dimension mismatch");
        return unvec(*super_ * vec(rho), dim());
    }
    ComplexMatrix out(dim(), dim());
    apply_matrix_free(rho, out);
    return out;
}

void Liouvillian::materialize(std::size_t max_dim) {
    if (!super_) super_ = build_superoperator(*this, max_dim);
}

const ComplexMatrix& Liouvillian::superoperator() const {
    if (!super_) throw std::logic_error("Liouvillian: superoperator not materialized");
    return *super_;
}

ComplexMatrix apply_liouvillian(const Liouvillian& liouv, const ComplexMatrix& rho) { return liouv.apply(rho); }

ComplexMatrix build_superoperator(const Liouvillian& liouv, std::size_t max_dim) {
    const Eigen::Index d = liouv.dim();
    if (static_cast<std::size_t>(d) > max_dim)
        throw std::invalid_argument("build_superoperator: Hilbert dimension " + std::to_string(d) +
                                    " exceeds cap " + std::to_string(max_dim));
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);

    ComplexMatrix heff = liouv.hamiltonian();
    for (const auto& jump : liouv.jumps()) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix c = embed(jump.local_op, jump.site, liouv.local_dims());
        heff -= (kI * (jump.rate / 2.0)) * (c.adjoint() * c);
    }
    // -i Heff ρ + i ρ Heff†
    ComplexMatrix s = (-kI) * kron(id, heff) + kI * kron(heff.conjugate(), id);
    for (const auto& jump : liouv.jumps()) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix c = embed(jump.local_op, jump.site, liouv.local_dims());
        s += jump.rate * kron(c.conjugate(), c);
    }
    return s;
}

// ----------------------------------------------------------------------------

EvolutionTrace evolve_from(const Liouvillian& liouv, const ComplexMatrix& rho0, double t0, double t_end,
                           const std::vector<double>& sample_times, const EvolveOptions& options) {
    if (rho0.rows() != liouv.dim() || rho0.cols() != liouv.dim())
        throw std::invalid_argument("evolve: initial state dimension mismatch");
    if (!(t_end >= t0)) throw std::invalid_argument("evolve: t_end before start time");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] < t0 || sample_times[i] > t_end)
            throw std::invalid_argument("evolve: sample time " + std::to_string(sample_times[i]) +
                                        " outside [t0, t_end]");
        if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
            throw std::invalid_argument("evolve: sample times must be strictly increasing");
    }

    EvolutionTrace trace;
    trace.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& obs : options.observables) trace.series[obs.name].reserve(sample_times.size());

    auto on_sample = [&](double t, const ComplexMatrix& raw) {
        const double drift = std::abs(raw.trace() - Complex(1.0));
        trace.max_trace_error = std::max(trace.max_trace_error, drift);
        if (drift > options.max_trace_drift)
            throw SolverError("evolve: trace drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                              " exceeds " + std::to_string(options.max_trace_drift));
        ComplexMatrix h = hermitize(raw);
        h /= h.trace().real();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        const double min_ev = es.eigenvalues().minCoeff();
        trace.min_eigenvalue = std::min(trace.min_eigenvalue, min_ev);
        if (min_ev < -kPsdTol) {
            // Integration noise on rank-deficient states; anything beyond the
            // drift budget is an integrator failure.
            if (min_ev < -options.max_trace_drift)
                throw SolverError("evolve: eigenvalue " + std::to_string(min_ev) + " at t = " + std::to_string(t));
            const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
            h = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().adjoint();
        }
        DensityMatrix rho = DensityMatrix::repaired(h);
        trace.times.push_back(t);
        for (const auto& obs : options.observables) trace.series[obs.name].push_back(obs.fn(rho));
        if (options.retain_states) trace.states.push_back(std::move(rho));
    };

    Dopri5Options opt;
    opt.rtol = options.rtol;
    opt.atol = options.atol;
    opt.initial_step = options.initial_step;
    std::function<void(const ComplexMatrix&, ComplexMatrix&)> rhs = [&liouv](const ComplexMatrix& y,
                                                                             ComplexMatrix& dy) {
        if (liouv.representation() == Representation::explicit_superoperator) {
            dy = liouv.apply(y);
        } else {
            dy.resize(y.rows(), y.cols());
            liouv.apply_hermitian(y, dy);
        }
    };
    try {
        trace.final_state = dopri5_integrate<ComplexMatrix>(rhs, rho0, t0, t_end, sample_times, on_sample, opt,
                                                           &trace.stats);
    } catch (const StepSizeUnderflow& e) {
        throw SolverError(std::string("evolve: ") + e.what());
    }
    if (trace.times.empty()) trace.min_eigenvalue = 0.0;
    return trace;
}

EvolutionTrace evolve(const Liouvillian& liouv, const DensityMatrix& rho0, double t_end,
                      const std::vector<double>& sample_times, const EvolveOptions& options) {
    return evolve_from(liouv, rho0.matrix(), 0.0, t_end, sample_times, options);
}

}  // namespace qsync
