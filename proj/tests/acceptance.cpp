// Acceptance run: one PASS/FAIL line per criterion, measured values alongside.
// `acceptance 3 4` runs a subset.

#include "qsync/config.hpp"
#include "qsync/liouvillian.hpp"
#include "qsync/observables.hpp"
#include "qsync/presets.hpp"
#include "qsync/spin1.hpp"
#include "qsync/sweep.hpp"
#include "qsync/synchronization.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

using namespace qsync;
using namespace qsync::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned worker_count() {
    if (auto w = workers_from_env()) return *w;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Steady states of the two-qubit oracle grid, shared by criteria 4 and 6.
std::vector<DensityMatrix>& grid_states() {
    static std::vector<DensityMatrix> states;
    return states;
}

Outcome fidelity_run(char panel, bool expect_product) {
    TrajectoryOptions o;
    o.include_noninteracting = false;
    o.seed = 0;
    const TrajectorySet set = run_fidelity_trajectories(fig1_spec(panel), o);
    double f_min = 1.0, f_max = 0.0, c_max = 0.0;
    std::string per_run;
    for (const auto& r : set.runs) {
        const double f = r.fidelity.back();
        const double c = r.max_connected.back();
        f_min = std::min(f_min, f);
        f_max = std::max(f_max, f);
        c_max = std::max(c_max, c);
        per_run += fmt(" %s: F = %.10f, max |C| = %.3e, residual %.1e;", r.name.c_str(), f, c, r.residual.back());
    }
    Outcome out;
    if (expect_product)
        out.pass = f_min >= 1.0 - 1e-6 && c_max <= 1e-6;
    else {
        // every run must sit away from the product state and show correlations
        double c_min = 1.0;
        for (const auto& r : set.runs) c_min = std::min(c_min, r.max_connected.back());
        out.pass = f_max <= 0.999 && c_min >= 1e-3;
    }
    out.detail = fmt("horizon t = %.4g;", set.horizon) + per_run;
    return out;
}

Outcome criterion1() { return fidelity_run('b', true); }
Outcome criterion2() { return fidelity_run('c', false); }

Outcome criterion3() {
    double worst = 0.0;
    int count = 0, nonzero = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const SystemSpec s = random_spec(2 + seed % 3, 10'000 + seed);
        const NogoResidual r = nogo_residual(s);
        const ComplexMatrix direct = apply_liouvillian(Liouvillian::from_spec(s), product_steady_state(s).matrix());
        worst = std::max(worst, max_abs(r.liouvillian_image - direct));
        nonzero += r.residual_norm > 1e-6 ? 1 : 0;
        ++count;
    }
    return {worst <= 1e-12, fmt("%d random XYZ specs (N = 2..4, %d with nonzero residual), max entrywise difference %.2e",
                                count, nonzero, worst)};
}

Outcome criterion4() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uu(0.1, 5.0), dd(-5.0, 5.0), mm(-0.98, 0.98), sc(0.2, 3.0);
    auto qubit = [&](double omega) {
        // rates from a random magnetization and a random overall scale
        const double m = mm(rng), s = sc(rng);
        return QubitParams{omega, s * (1 + m) / 2, s * (1 - m) / 2};
    };
    int points = 0, bad = 0;
    double worst_rel = 0.0, worst_uz = 0.0;
    grid_states().clear();
    for (int i = 0; i < 70; ++i) {
        const double u = uu(rng), delta = dd(rng);
        const QubitParams q1 = qubit(delta), q2 = qubit(0.0);
        const Complex expect = two_qubit_analytic(two_qubit_params(q1, q2, u));
        Complex first;
        for (double uz : {0.0, 1.0, 3.0}) {
            const SystemSpec s = make_xxz_spec({q1, q2}, u, uz, Topology::all_to_all);
            Liouvillian l = Liouvillian::from_spec(s);
            l.materialize();
            const SteadyStateResult ss = steady_state(l, SteadyMethod::nullspace, 1e-9);
            const Complex got = flip_flop(ss.rho_ss);
            const double err = std::abs(got - expect);
            const double allowed = std::max(1e-12, 1e-8 * std::abs(expect));
            if (err > allowed) ++bad;
            worst_rel = std::max(worst_rel, err / std::max(std::abs(expect), 1e-300));
            if (uz == 0.0)
                first = got;
            else
                worst_uz = std::max(worst_uz, std::abs(got - first) / std::max(std::abs(first), 1e-12));
            grid_states().push_back(ss.rho_ss);
            ++points;
        }
    }
    const bool uz_ok = worst_uz <= 1e-8;
    return {bad == 0 && uz_ok && points >= 200,
            fmt("%d points, %d outside tolerance, max relative error %.2e, max U^z spread %.2e", points, bad, worst_rel,
                worst_uz)};
}

Outcome criterion5() {
    const SystemSpec s = fig2_spec(0.25, -0.25, 1.0, 0.0);
    const SyncReport rep = sync_report(steady_state(Liouvillian::from_spec(s)).rho_ss, s);
    const Complex formula = two_qubit_analytic(two_qubit_params(s.qubits[0], s.qubits[1], 1.0));
    const double s_formula = kSMaxPerFlipFlop * std::abs(formula);
    const double rel = std::abs(rep.total - s_formula) / s_formula;
    // hand value: 4*1.6*1.6*0.5*3.2 / (64*3.2^2 + 1.6^2*3.2^2) = 0.0240385
    const bool hand = std::abs(std::abs(formula) - 16.384 / 681.5744) < 1e-12 && std::abs(rep.total - 4.72e-3) < 5e-6;
    double blockade = 0.0;
    for (double m : linspace(-1.0, 1.0, 41)) {
        const SystemSpec d = fig2_spec(m, m, 1.0, 0.0);
        // raw amplitude, without the report's zero cutoff
        blockade = std::max(blockade, kSMaxPerFlipFlop * std::abs(flip_flop(steady_state(Liouvillian::from_spec(d)).rho_ss)));
    }
    return {rel <= 1e-8 && hand && blockade <= 1e-10,
            fmt("S^max = %.10e (formula %.10e, relative difference %.1e), <s+s-> = %.8f%+.8fi, max diagonal S^max %.1e",
                rep.total, s_formula, rel, rep.per_pair[0].flip_flop.real(), rep.per_pair[0].flip_flop.imag(), blockade)};
}

Outcome criterion6() {
    if (grid_states().empty()) criterion4();
    double worst_random = 0.0, worst_grid = 0.0;
    const double phis[] = {0.0, 0.9, 2.3, 4.1, 5.6};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const DensityMatrix r = random_density(4, 50'000 + seed);
        for (double ph : phis) worst_random = std::max(worst_random, std::abs(s_rel_quadrature(r, ph) - s_rel_analytic(r, ph)));
    }
    for (std::size_t i = 0; i < grid_states().size(); ++i) {
        const double ph = phis[i % 5];
        worst_grid = std::max(worst_grid, std::abs(s_rel_quadrature(grid_states()[i], ph) - s_rel_analytic(grid_states()[i], ph)));
    }
    return {std::max(worst_random, worst_grid) <= 1e-6,
            fmt("60 random states: max |quadrature - closed form| %.2e; %zu grid steady states: %.2e", worst_random,
                grid_states().size(), worst_grid)};
}

struct Deviation {
    double grid_normalized = 0.0;  // max |a - b| / max over grid of a
    double pointwise = 0.0;        // max |a - b| / max(a, b) over points with S above 1e-6 of the grid max
    double m1 = 0.0, m_env = 0.0;  // where the grid-normalized maximum sits
    std::size_t failed = 0;
};

Deviation compare_panels(char pa, char pb, int n) {
    SweepRunOptions o;
    o.workers = worker_count();
    const SweepGrid a = run_sweep(fig3_definition(pa, n), o);
    const SweepGrid b = run_sweep(fig3_definition(pb, n), o);
    const std::size_t k = a.output_index("s_total");
    Deviation d;
    d.failed = a.failed_count() + b.failed_count();
    double top = 0.0;
    for (const auto& r : a.rows) top = std::max(top, r.values[k]);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const double x = a.rows[i].values[k], y = b.rows[i].values[k];
        const double dev = std::abs(x - y) / top;
        if (dev > d.grid_normalized) {
            d.grid_normalized = dev;
            d.m1 = a.rows[i].coords[0];
            d.m_env = a.rows[i].coords[1];
        }
        if (std::max(x, y) > 1e-6 * top) d.pointwise = std::max(d.pointwise, std::abs(x - y) / std::max(x, y));
    }
    return d;
}

Outcome criterion7() {
    const int n = 11;
    const Deviation ab = compare_panels('a', 'b', n), cd = compare_panels('c', 'd', n);
    const double threshold = 0.05;
    const bool pass = ab.failed == 0 && cd.failed == 0 && ab.grid_normalized <= threshold && cd.grid_normalized > threshold;
    return {pass, fmt("%dx%d grid over (m1, m_env); a vs b: max deviation %.2f%% of the grid maximum at (%.1f, %.1f), "
                      "pointwise relative %.1f%%; c vs d: %.2f%% (pointwise %.1f%%); threshold 5%%",
                      n, n, 100 * ab.grid_normalized, ab.m1, ab.m_env, 100 * ab.pointwise, 100 * cd.grid_normalized,
                      100 * cd.pointwise)};
}

Outcome criterion8() {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> u(-4, 4);
    double pattern = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double ux = u(rng), uy = u(rng), uz = u(rng);
        ComplexMatrix expect = ComplexMatrix::Zero(9, 9);
        expect(0, 4) = expect(8, 4) = uy - ux;
        expect(2, 4) = expect(6, 4) = -(ux + uy);
        expect(4, 0) = expect(4, 8) = ux - uy;
        expect(4, 2) = expect(4, 6) = ux + uy;
        pattern = std::max(pattern, max_abs(spin1_commutator(ux, uy, uz) - expect));
    }
    bool iff = true;
    const double grid[] = {-1.5, -0.3, 0.0, 0.3, 1.5};
    for (double ux : grid)
        for (double uy : grid)
            for (double uz : {-1.0, 0.0, 2.0}) {
                const bool zero = max_abs(spin1_commutator(ux, uy, uz)) == 0.0;
                iff = iff && zero == (ux == 0.0 && uy == 0.0);
            }
    Spin1Spec s;
    s.ux = s.uy = 1.0;
    const SteadyStateResult ss = spin1_steady_state(s, DissipationScheme::side_to_center);
    const double corr = spin1_max_connected_correlation(ss.rho_ss);
    const Complex pm = connected_correlation(ss.rho_ss, 0, spin1_op(Axis::plus), 1, spin1_op(Axis::minus), LocalDims{3, 3});
    return {pattern <= 1e-14 && iff && corr >= 1e-4,
            fmt("pattern max deviation %.1e at 5 random couplings; zero iff Ux = Uy = 0 on 75 grid points: %s; "
                "side_to_center Ux = Uy = 1: max connected correlation %.4e (connected <J+ J-> = %.1e), residual %.1e",
                pattern, iff ? "yes" : "no", corr, std::abs(pm), ss.residual_norm)};
}

Outcome criterion9() {
    std::string dims;
    bool closure = true;
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::size_t got = algebra_closure_dim(random_spec(n, 70 + n), false);
        closure = closure && got == (std::size_t{1} << (2 * n));
        dims += fmt("N=%zu: %zu ", n, got);
    }
    int checked = 0, unique = 0;
    auto check = [&](const SystemSpec& s) {
        Liouvillian l = Liouvillian::from_spec(s);
        l.materialize();
        const SteadyStateResult ss = steady_state(l, SteadyMethod::nullspace, 1e-9);
        ++checked;
        unique += ss.kernel_dim == 1 ? 1 : 0;
    };
    for (std::uint64_t seed = 0; seed < 40; ++seed) check(random_spec(1 + seed % 4, 900 + seed));
    for (double m : {-0.5, 0.0, 0.25, 1.0}) check(fig2_spec(m, -m, 1.0, 0.5));
    check(fig3_spec('a', 0.3, -0.6));
    check(fig3_spec('d', -1.0, 1.0));
    return {closure && unique == checked,
            "closure dims " + dims + fmt("; kernel dimension 1 for %d of %d dissipative specs (N = 1..5)", unique, checked)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const int rc = std::system((std::string(QSYNC_BIN) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome criterion10() {
    const fs::path dir = fs::temp_directory_path() / ("qsync_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path evolve_cfg = dir / "evolve.json", sweep_cfg = dir / "sweep.json";
    std::ofstream(evolve_cfg) << R"({"spec": {"qubits": [{"m": 0.5}, {"m": -0.2}, {"m": 0.1}], "topology": "all_to_all",
        "coupling": {"ux": 1.0, "uy": 0.7, "uz": 0.2}}, "init": {"kind": "random_pure", "seed": 17},
        "params": {"t_end": 5, "samples": 21, "correlation_sums": true}})";
    std::ofstream(sweep_cfg) << R"({"spec": {"qubits": [{"m": 0.5}, {"m": -0.2}, {"m": 0.1}], "topology": "all_to_all",
        "coupling": {"u": 1.0, "uz": 0.2}},
        "sweep": {"axes": [{"param": "qubits[0].m", "start": -0.8, "stop": 0.8, "count": 5},
                           {"param": "u", "values": [0.5, 1.0, 2.0]}]}})";
    bool ok = true;
    std::string note;
    ok = ok && cli("evolve --config " + evolve_cfg.string() + " --out " + (dir / "e1.csv").string()) == 0;
    ok = ok && cli("evolve --config " + evolve_cfg.string() + " --out " + (dir / "e2.csv").string()) == 0;
    const bool evolve_same = ok && slurp(dir / "e1.csv") == slurp(dir / "e2.csv");
    // rerun from the sidecar alone
    ok = ok && cli("evolve --config " + (dir / "e1.json").string() + " --out " + (dir / "e3.csv").string()) == 0;
    const bool sidecar_same = ok && slurp(dir / "e1.csv") == slurp(dir / "e3.csv");

    ok = ok && cli("sweep --config " + sweep_cfg.string() + " --workers 1 --out " + (dir / "full.csv").string()) == 0;
    ok = ok && cli("sweep --config " + sweep_cfg.string() + " --workers 3 --out " + (dir / "full3.csv").string()) == 0;
    const bool workers_same = ok && slurp(dir / "full.csv") == slurp(dir / "full3.csv");

    // interrupted run: stop after 6 points, leave a torn row, then resume
    nlohmann::json part = nlohmann::json::parse(slurp(sweep_cfg));
    part["sweep"]["max_points"] = 6;
    std::ofstream(dir / "part.json") << part.dump();
    ok = ok && cli("sweep --config " + (dir / "part.json").string() + " --out " + (dir / "resumed.csv").string()) == 0;
    std::ofstream(dir / "resumed.csv", std::ios::app) << "6,-0.40000000000000002,0.5,ok,1.2";
    ok = ok && cli("sweep --config " + sweep_cfg.string() + " --workers 2 --out " + (dir / "resumed.csv").string()) == 0;
    const bool resume_same = ok && slurp(dir / "full.csv") == slurp(dir / "resumed.csv");

    fs::remove_all(dir);
    note = fmt("evolve rerun identical: %s; rerun from sidecar identical: %s; sweep 1 vs 3 workers identical: %s; "
               "interrupted + resumed sweep identical: %s",
               evolve_same ? "yes" : "no", sidecar_same ? "yes" : "no", workers_same ? "yes" : "no",
               resume_same ? "yes" : "no");
    return {ok && evolve_same && sidecar_same && workers_same && resume_same, note};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9, criterion10};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) {
        if (!selected.empty() && !selected.count(c)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(c - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s  [%.1f s]\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
