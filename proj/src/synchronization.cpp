#include "qsync/synchronization.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>

namespace qsync {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angles(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi)) throw std::invalid_argument("husimi: theta outside [0, pi]");
    if (!(phi >= 0.0 && phi < 2.0 * kPi)) throw std::invalid_argument("husimi: phi outside [0, 2pi)");
}

Eigen::Vector2cd coherent_state(double cos_half, double sin_half, double phi) {
    return {std::polar(cos_half, -phi / 2.0), std::polar(sin_half, phi / 2.0)};
}

Eigen::Vector2cd coherent_state(double theta, double phi) {
    return coherent_state(std::cos(theta / 2.0), std::sin(theta / 2.0), phi);
}

void require_dim(const DensityMatrix& rho, Eigen::Index d, const char* who) {
    if (rho.dim() != d)
        throw std::invalid_argument(std::string(who) + ": expected dimension " + std::to_string(d));
}

}  // namespace

double husimi_q_single(const DensityMatrix& rho, double theta, double phi) {
    require_dim(rho, 2, "husimi_q_single");
    check_angles(theta, phi);
    const Eigen::Vector2cd psi = coherent_state(theta, phi);
    return (psi.adjoint() * rho.matrix() * psi)(0, 0).real() / (2.0 * kPi);
}

double husimi_q_pair(const DensityMatrix& rho_jk, double theta_j, double theta_k, double phi_j, double phi_k) {
    require_dim(rho_jk, 4, "husimi_q_pair");
    check_angles(theta_j, phi_j);
    check_angles(theta_k, phi_k);
    const ComplexVector psi = kron(coherent_state(theta_j, phi_j), coherent_state(theta_k, phi_k));
    return (psi.adjoint() * rho_jk.matrix() * psi)(0, 0).real() / (4.0 * kPi * kPi);
}

double s_function_single(const DensityMatrix& rho, double phi) {
    require_dim(rho, 2, "s_function_single");
    const Complex sp = rho(1, 0);  // Tr(ρ σ+)
    return 0.25 * (sp.real() * std::cos(phi) + sp.imag() * std::sin(phi));
}

Complex flip_flop(const DensityMatrix& rho_jk) {
    require_dim(rho_jk, 4, "flip_flop");
    return rho_jk(2, 1);  // Tr(ρ |up,down><down,up|)
}

double locked_phase(Complex c) {
    if (std::abs(c) <= 1e-12) return 0.0;
    const double a = std::arg(c);
    return a <= -kPi ? kPi : a;
}

double s_rel_analytic(const DensityMatrix& rho_jk, double phi) {
    const Complex c = flip_flop(rho_jk);
    if (std::abs(c) <= 1e-12) return 0.0;
    return kSMaxPerFlipFlop * std::abs(c) * std::cos(phi - locked_phase(c));
}

double s_rel_quadrature(const DensityMatrix& rho_jk, double phi, int n_theta, int n_phi) {
    require_dim(rho_jk, 4, "s_rel_quadrature");
    if (n_theta < 16 || n_phi < 16) throw std::invalid_argument("s_rel_quadrature: orders must be >= 16");

    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n_theta)),
        &gsl_integration_glfixed_table_free);
    if (!table) throw std::runtime_error("s_rel_quadrature: Gauss-Legendre table allocation failed");

    // x = cos θ, sin θ dθ = dx; cos(θ/2) = sqrt((1+x)/2), sin(θ/2) = sqrt((1-x)/2)
    std::vector<double> ch(n_theta), sh(n_theta), w(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        double x = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x, &w[i], table.get());
        ch[i] = std::sqrt((1.0 + x) / 2.0);
        sh[i] = std::sqrt((1.0 - x) / 2.0);
    }

    const ComplexMatrix& rho = rho_jk.matrix();
    const double dphi = 2.0 * kPi / n_phi;
    double total = 0.0;
    for (int p = 0; p < n_phi; ++p) {
        const double phi2 = p * dphi;
        for (int a = 0; a < n_theta; ++a) {
            const Eigen::Vector2cd v1 = coherent_state(ch[a], sh[a], phi + phi2);
            for (int b = 0; b < n_theta; ++b) {
                const Eigen::Vector2cd v2 = coherent_state(ch[b], sh[b], phi2);
                Eigen::Vector4cd psi;
                psi << v1(0) * v2(0), v1(0) * v2(1), v1(1) * v2(0), v1(1) * v2(1);
                total += w[a] * w[b] * (psi.adjoint() * rho * psi)(0, 0).real();
            }
        }
    }
    return -1.0 / (2.0 * kPi) + total * dphi / (4.0 * kPi * kPi);
}

TwoQubitAnalyticParams two_qubit_params(const QubitParams& q1, const QubitParams& q2, double u) {
    TwoQubitAnalyticParams p;
    p.delta = q1.omega - q2.omega;
    p.u = u;
    p.gamma1 = q1.gamma_gain + q1.gamma_damp;
    p.gamma2 = q2.gamma_gain + q2.gamma_damp;
    p.m1 = magnetization(q1.gamma_gain, q1.gamma_damp);
    p.m2 = magnetization(q2.gamma_gain, q2.gamma_damp);
    p.gamma = p.gamma1 + p.gamma2;
    return p;
}

Complex two_qubit_analytic(const TwoQubitAnalyticParams& p) {
    if (!(p.gamma1 > 0.0 && p.gamma2 > 0.0)) throw std::invalid_argument("two_qubit_analytic: rates must be > 0");
    if (std::abs(p.gamma - (p.gamma1 + p.gamma2)) > 1e-12 * p.gamma)
        throw std::invalid_argument("two_qubit_analytic: gamma must equal gamma1 + gamma2");
    const double g = p.gamma, g12 = p.gamma1 * p.gamma2;
    const Complex num = 4.0 * p.u * g12 * (p.m1 - p.m2) * Complex(4.0 * p.delta, -g);
    const double den = 64.0 * g * g * p.u * p.u + g12 * (g * g + 16.0 * p.delta * p.delta);
    return num / den;
}

SyncReport sync_report(const DensityMatrix& rho, const SystemSpec& spec) {
    if (static_cast<std::size_t>(rho.dim()) != spec.dim())
        throw std::invalid_argument("sync_report: state dimension does not match spec");
    const LocalDims dims = spec.local_dims();
    SyncReport report;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        for (std::size_t k = j + 1; k < spec.size(); ++k) {
            const DensityMatrix rho_jk = partial_trace(rho, {j, k}, dims);
            PairSync ps{j, k, 0.0, 0.0, flip_flop(rho_jk)};
            ps.phi0 = locked_phase(ps.flip_flop);
            ps.s_max = std::abs(ps.flip_flop) <= 1e-12 ? 0.0 : kSMaxPerFlipFlop * std::abs(ps.flip_flop);
            report.total += ps.s_max;
            report.per_pair.push_back(ps);
        }
    }
    return report;
}

}  // namespace qsync
