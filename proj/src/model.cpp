#include "qsync/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

namespace qsync {

Topology parse_topology(std::string_view name) {
    if (name == "all_to_all") return Topology::all_to_all;
    if (name == "one_to_all") return Topology::one_to_all;
    if (name == "custom") return Topology::custom;
    throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

std::string_view topology_name(Topology t) {
    switch (t) {
        case Topology::all_to_all: return "all_to_all";
        case Topology::one_to_all: return "one_to_all";
        case Topology::custom: return "custom";
    }
    return "custom";
}

void SystemSpec::validate() const {
    if (qubits.empty()) throw SpecError("qubits", "at least one qubit required");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const auto& q = qubits[i];
        const std::string path = "qubits[" + std::to_string(i) + "]";
        if (!std::isfinite(q.omega) || !std::isfinite(q.gamma_gain) || !std::isfinite(q.gamma_damp))
            throw SpecError(path, "non-finite parameter");
        if (q.gamma_gain < 0.0) throw SpecError(path + ".gamma_gain", "must be >= 0");
        if (q.gamma_damp < 0.0) throw SpecError(path + ".gamma_damp", "must be >= 0");
        if (q.gamma_gain + q.gamma_damp <= 0.0)
            throw SpecError(path, "gamma_gain + gamma_damp must be > 0 (every qubit dissipative)");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < interactions.size(); ++i) {
        const auto& t = interactions[i];
        const std::string path = "interactions[" + std::to_string(i) + "]";
        if (t.j >= qubits.size() || t.k >= qubits.size())
            throw SpecError(path, "site index out of range");
        if (t.j >= t.k) throw SpecError(path, "requires j < k");
        if (!seen.emplace(t.j, t.k).second)
            throw SpecError(path, "duplicate pair (" + std::to_string(t.j) + "," + std::to_string(t.k) + ")");
    }
}

SystemSpec make_spec(std::vector<QubitParams> qubits, double ux, double uy, double uz, Topology topology) {
    SystemSpec spec;
    spec.qubits = std::move(qubits);
    spec.topology = topology;
    const std::size_t n = spec.qubits.size();
    if (topology == Topology::all_to_all) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) spec.interactions.push_back({j, k, ux, uy, uz});
    } else if (topology == Topology::one_to_all) {
        for (std::size_t k = 1; k < n; ++k) spec.interactions.push_back({0, k, ux, uy, uz});
    }
    return spec;
}

double magnetization(double gamma_gain, double gamma_damp) {
    if (gamma_gain < 0.0 || gamma_damp < 0.0) throw std::invalid_argument("magnetization: negative rate");
    if (gamma_gain + gamma_damp <= 0.0) throw std::invalid_argument("magnetization: both rates zero");
    if (gamma_damp == 0.0) return 1.0;
    return 1.0 - 2.0 / (gamma_gain / gamma_damp + 1.0);
}

QubitParams qubit_with_magnetization(double m, double omega, double scale) {
    if (!(m >= -1.0 && m <= 1.0)) throw std::invalid_argument("magnetization must lie in [-1, 1]");
    // gain/damp = (1+m)/(1-m)
    if (m >= 0.0) return {omega, scale, scale * (1.0 - m) / (1.0 + m)};
    return {omega, scale * (1.0 + m) / (1.0 - m), scale};
}

ComplexMatrix build_hamiltonian(const SystemSpec& spec) {
    spec.validate();
    const LocalDims dims = spec.local_dims();
    const auto d = static_cast<Eigen::Index>(spec.dim());
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < spec.size(); ++j)
        h += (spec.qubits[j].omega / 2.0) * embed(pauli(Axis::z), j, dims);
    for (const auto& t : spec.interactions) {
        const std::pair<Axis, double> terms[] = {{Axis::x, t.ux}, {Axis::y, t.uy}, {Axis::z, t.uz}};
        for (const auto& [axis, u] : terms) {
            if (u == 0.0) continue;
            h += u * embed(pauli(axis), t.j, dims) * embed(pauli(axis), t.k, dims);
        }
    }
    return h;
}

DensityMatrix product_steady_state(const SystemSpec& spec) {
    spec.validate();
    ComplexMatrix rho = ComplexMatrix::Ones(1, 1);
    for (const auto& q : spec.qubits) {
        const double m = magnetization(q.gamma_gain, q.gamma_damp);
        ComplexMatrix local = ComplexMatrix::Zero(2, 2);
        local(0, 0) = (1.0 + m) / 2.0;
        local(1, 1) = (1.0 - m) / 2.0;
        rho = kron(rho, local);
    }
    return DensityMatrix(std::move(rho));
}

StateInit::Kind parse_init_kind(std::string_view name) {
    if (name == "ghz") return StateInit::Kind::ghz;
    if (name == "random_pure") return StateInit::Kind::random_pure;
    if (name == "product_steady") return StateInit::Kind::product_steady;
    if (name == "explicit") return StateInit::Kind::explicit_matrix;
    throw std::invalid_argument("unknown init kind '" + std::string(name) + "'");
}

std::string_view init_kind_name(StateInit::Kind kind) {
    switch (kind) {
        case StateInit::Kind::ghz: return "ghz";
        case StateInit::Kind::random_pure: return "random_pure";
        case StateInit::Kind::product_steady: return "product_steady";
        case StateInit::Kind::explicit_matrix: return "explicit";
    }
    return "?";
}

ComplexVector random_pure_vector(std::size_t dim, std::uint64_t seed) {
    // Box-Muller on raw engine output: std::normal_distribution is not
    // specified bit-for-bit across standard libraries.
    std::mt19937_64 engine(seed);
    auto uniform = [&engine] {
        return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
    };
    ComplexVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        v(i) = Complex(r * std::cos(phi), r * std::sin(phi));
    }
    return v / v.norm();
}

DensityMatrix initial_state(const StateInit& init, const SystemSpec& spec) {
    const auto d = static_cast<Eigen::Index>(spec.dim());
    switch (init.kind) {
        case StateInit::Kind::ghz: {
            ComplexVector psi = ComplexVector::Zero(d);
            psi(0) = psi(d - 1) = 1.0 / std::sqrt(2.0);
            return DensityMatrix::repaired(psi * psi.adjoint());
        }
        case StateInit::Kind::random_pure: {
            const ComplexVector psi = random_pure_vector(spec.dim(), init.seed);
            return DensityMatrix::repaired(psi * psi.adjoint());
        }
        case StateInit::Kind::product_steady:
            return product_steady_state(spec);
        case StateInit::Kind::explicit_matrix:
            if (!init.matrix) throw SpecError("init.matrix", "explicit init requires a matrix");
            if (init.matrix->dim() != d) throw SpecError("init.matrix", "dimension does not match register");
            return *init.matrix;
    }
    throw std::logic_error("initial_state: unhandled kind");
}

}  // namespace qsync
