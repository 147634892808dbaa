#include "qsync/liouvillian.hpp"

#include <cmath>

namespace qsync {

namespace {

constexpr double kRankTol = 1e-10;

/// Orthonormal column basis of vectorized operators, grown one vector at a time.
class SpanBuilder {
public:
    explicit SpanBuilder(Eigen::Index n) : q_(n, 0) {}

    // Classical Gram-Schmidt applied twice; returns true if `v` added a new direction.
    bool add(ComplexVector v) {
        const double n0 = v.norm();
        if (n0 == 0.0) return false;
        v /= n0;
        for (int pass = 0; pass < 2; ++pass)
            if (q_.cols() > 0) v -= q_ * (q_.adjoint() * v);
        const double n1 = v.norm();
        if (n1 < kRankTol) return false;
        q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
        q_.col(q_.cols() - 1) = v / n1;
        return true;
    }

    Eigen::Index size() const { return q_.cols(); }
    ComplexVector col(Eigen::Index i) const { return q_.col(i); }

private:
    ComplexMatrix q_;
};

}  // namespace

std::size_t algebra_closure_dim(const std::vector<ComplexMatrix>& generators, int max_iterations) {
    if (generators.empty()) return 0;
    const Eigen::Index d = generators.front().rows();
    for (const auto& g : generators)
        if (g.rows() != d || g.cols() != d)
            throw std::invalid_argument("algebra_closure_dim: generators must share one square dimension");

    SpanBuilder span(d * d);
    for (const auto& g : generators) span.add(vec(g));

    // Each pass multiplies every basis element found so far by every
    // generator on both sides; the span is closed once a pass adds nothing.
    Eigen::Index processed = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::Index before = span.size();
        for (Eigen::Index b = processed; b < before; ++b) {
            const ComplexMatrix m = unvec(span.col(b), d);
            for (const auto& g : generators) {
                span.add(vec(g * m));
                span.add(vec(m * g));
            }
            if (span.size() == d * d) return static_cast<std::size_t>(d * d);
        }
        processed = before;
        if (span.size() == before) return static_cast<std::size_t>(before);
    }
    throw SolverError("algebra_closure_dim: no stabilization after " + std::to_string(max_iterations) +
                      " iterations");
}

std::size_t algebra_closure_dim(const SystemSpec& spec, bool include_hamiltonian) {
    spec.validate();
    const LocalDims dims = spec.local_dims();
    std::vector<ComplexMatrix> gens;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (spec.qubits[j].gamma_gain > 0.0) {
            gens.push_back(embed(pauli(Axis::plus), j, dims));
            gens.push_back(embed(pauli(Axis::minus), j, dims));
        }
        if (spec.qubits[j].gamma_damp > 0.0) {
            gens.push_back(embed(pauli(Axis::minus), j, dims));
            gens.push_back(embed(pauli(Axis::plus), j, dims));
        }
    }
    if (include_hamiltonian) gens.push_back(build_hamiltonian(spec));
    return algebra_closure_dim(gens);
}

NogoResidual nogo_residual(const SystemSpec& spec) {
    spec.validate();
    const std::size_t n = spec.size();
    const DensityMatrix rho0 = product_steady_state(spec);

    std::vector<double> m(n);
    std::vector<ComplexMatrix> local(n);
    for (std::size_t l = 0; l < n; ++l) {
        m[l] = magnetization(spec.qubits[l].gamma_gain, spec.qubits[l].gamma_damp);
        local[l] = ComplexMatrix::Zero(2, 2);
        local[l](0, 0) = (1.0 + m[l]) / 2.0;
        local[l](1, 1) = (1.0 - m[l]) / 2.0;
    }
    // a on site j, b on site k, rho_l0 on every other site
    auto pair_op = [&](std::size_t j, const ComplexMatrix& a, std::size_t k, const ComplexMatrix& b) {
        ComplexMatrix out = ComplexMatrix::Ones(1, 1);
        for (std::size_t l = 0; l < n; ++l) out = kron(out, l == j ? a : (l == k ? b : local[l]));
        return out;
    };

    const ComplexMatrix sp = pauli(Axis::plus), sm = pauli(Axis::minus);
    NogoResidual out;
    out.commutator = ComplexMatrix::Zero(rho0.dim(), rho0.dim());
    double coupling_scale = 1.0;
    for (const auto& t : spec.interactions) {
        PairCoefficients c{t.j, t.k, (m[t.j] - m[t.k]) * (t.ux + t.uy), (m[t.j] + m[t.k]) * (t.ux - t.uy)};
        out.pairs.push_back(c);
        coupling_scale += std::abs(t.ux) + std::abs(t.uy) + std::abs(t.uz);
        if (c.flip_flop != 0.0)
            out.commutator -= 0.5 * c.flip_flop * (pair_op(t.j, sp, t.k, sm) - pair_op(t.j, sm, t.k, sp));
        if (c.pair_flip != 0.0)
            out.commutator -= 0.5 * c.pair_flip * (pair_op(t.j, sp, t.k, sp) - pair_op(t.j, sm, t.k, sm));
    }
    // The local terms annihilate the product state, leaving only -i[U, rho0].
    out.liouvillian_image = -kI * out.commutator;
    out.residual_norm = out.liouvillian_image.norm();

    const Liouvillian liouv = Liouvillian::from_spec(spec);
    out.cross_check_error = max_abs(out.liouvillian_image - liouv.apply(rho0.matrix()));
    if (out.cross_check_error > 1e-12 * coupling_scale)
        throw SolverError("nogo_residual: closed form disagrees with the generator by " +
                          std::to_string(out.cross_check_error));
    return out;
}

}  // namespace qsync
