#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "stripelab/diagnostics.hpp"
#include "stripelab/solver.hpp"

using namespace stripelab;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

PeriodicGrid grid_1d(int n_x, int n_z = 16) {
    PeriodicGrid g;
    g.n_x = n_x;
    g.n_z = n_z;
    return g;
}

ModelParams kinetic_params() {
    ModelParams p;
    p.sobolev_s = 3;
    return p;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// 4th-order centered first-derivative stencil, applied repeatedly: the
// finite-difference oracle for the spectral Sobolev norms.
std::vector<double> fd_derivative(const std::vector<double>& f, double dx) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(f.size());
    for (int i = 0; i < n; ++i) {
        const auto at = [&](int j) { return f[static_cast<std::size_t>(((j % n) + n) % n)]; };
        out[static_cast<std::size_t>(i)] =
            (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dx);
    }
    return out;
}

}  // namespace

TEST_CASE("energies vanish on the zero state") {
    const PeriodicGrid g = grid_1d(32);
    const ModelParams p = kinetic_params();
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    DiagnosticsEngine engine(g, p, hc, RunKind::Kinetic);
    KineticState s;
    s.rho = KineticField(g);
    s.h = ScalarField(g);
    s.n = ScalarField(g);
    const auto [E, D] = engine.energy_kinetic(s, 3);
    CHECK(E == 0.0);
    CHECK(D == 0.0);
}

TEST_CASE("kinetic energy of a pure AHL sine matches the Parseval closed form") {
    const PeriodicGrid g = grid_1d(128, 8);
    ModelParams p = kinetic_params();  // constant profile: eta = 0
    p.D_h = 0.7;
    p.beta = 1.3;
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    REQUIRE(hc.eta == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    DiagnosticsEngine engine(g, p, hc, RunKind::Kinetic);
    KineticState s;
    s.rho = KineticField(g);
    s.h = ScalarField(g);
    s.n = ScalarField(g);
    for (int i = 0; i < g.n_x; ++i) s.h[i] = std::sin(g.x_coord(i));
    const auto [E, D] = engine.energy_kinetic(s, 3);
    CHECK(E == doctest::Approx(4.0 * kPi).epsilon(1e-9));
    CHECK(D == doctest::Approx(4.0 * kPi * p.D_h + 2.0 * kPi * p.beta).epsilon(1e-9));
}

TEST_CASE("kinetic energy matches a finite-difference norm oracle within 1%") {
    const PeriodicGrid g = grid_1d(128, 8);
    const ModelParams p = kinetic_params();
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    DiagnosticsEngine engine(g, p, hc, RunKind::Kinetic);
    // band-limited smooth h, zero rho and n keep the oracle one-dimensional
    KineticState s;
    s.rho = KineticField(g);
    s.n = ScalarField(g);
    s.h = ScalarField(g);
    std::mt19937_64 rng(42);
    for (int m = 0; m <= 3; ++m) {
        const double a = 2.0 * uniform(rng) - 1.0;
        const double b = 2.0 * uniform(rng) - 1.0;
        for (int i = 0; i < g.n_x; ++i)
            s.h[i] += a * std::cos(m * g.x_coord(i)) + b * std::sin(m * g.x_coord(i));
    }
    const auto [E, D] = engine.energy_kinetic(s, 3);
    (void)D;
    std::vector<double> f = s.h.values();
    double oracle = 0.0;
    for (int order = 0; order <= 3; ++order) {
        double l2 = 0.0;
        for (double v : f) l2 += v * v;
        oracle += l2 * g.dx();
        f = fd_derivative(f, g.dx());
    }
    CHECK(E == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("macroscopic energies: trivial zero state and constant-mobility DD_l") {
    const PeriodicGrid g = grid_1d(64, 8);
    ModelParams p = kinetic_params();
    p.sobolev_s = 4;
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    DiagnosticsEngine engine(g, p, hc, RunKind::MacroAd);
    MacroState zero;
    zero.rho = ScalarField(g);
    zero.h = ScalarField(g);
    zero.n = ScalarField(g);
    const auto e0 = engine.energy_macro(zero, 4);
    CHECK(e0[0] == 0.0);
    CHECK(e0[1] == 0.0);
    CHECK(e0[3] == 0.0);

    MacroState s = zero;
    for (int i = 0; i < g.n_x; ++i) s.h[i] = 0.3 + 0.2 * std::sin(g.x_coord(i));
    const auto e = engine.energy_macro(s, 4);
    // constant-rate profile: Dtilde is h-independent, so its gradient energy vanishes
    CHECK(e[3] <= 1e-15);
    CHECK(e[2] > 0.0);
    CHECK_THROWS_AS(engine.energy_macro(s, 3), InvalidParameterError);
}

TEST_CASE("EE_l stays controlled by C (1 + E_l^s) across amplitudes") {
    const PeriodicGrid g = grid_1d(64, 8);
    ModelParams p = kinetic_params();
    p.sobolev_s = 4;
    p.motility_profile = MotilityProfile::Cosine;
    p.lambda_c = 2.0;
    p.lambda_a = 1.0;
    const HypothesisConstants hc = hypothesis_constants(p, 1024);
    DiagnosticsEngine engine(g, p, hc, RunKind::MacroAd);
    double C = 0.0;
    for (double amp : {0.1, 0.4, 0.8, 1.2}) {
        MacroState s;
        s.rho = ScalarField(g);
        s.n = ScalarField(g);
        s.h = ScalarField(g);
        for (int i = 0; i < g.n_x; ++i)
            s.h[i] = p.h_bar + amp * std::sin(g.x_coord(i)) + 0.3 * amp * std::cos(2.0 * g.x_coord(i));
        const auto e = engine.energy_macro(s, 4);
        const double ratio = e[2] / (1.0 + std::pow(e[0], 4));
        C = std::max(C, ratio);
    }
    CHECK(C > 0.0);
    CHECK(C < 1e6 * hc.b * hc.b);  // bounded by the sampled derivative budget
}

TEST_CASE("energies dominate their lower-index counterparts") {
    const PeriodicGrid g = grid_1d(32, 16);
    ModelParams p = kinetic_params();
    p.sobolev_s = 4;
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    DiagnosticsEngine engine(g, p, hc, RunKind::Kinetic);
    KineticState s;
    s.rho = KineticField(g);
    s.h = ScalarField(g);
    s.n = ScalarField(g);
    std::mt19937_64 rng(3);
    for (int x = 0; x < g.n_x; ++x) {
        s.h[x] = std::sin(g.x_coord(x));
        s.n[x] = std::cos(2.0 * g.x_coord(x));
        for (int k = 0; k < g.n_z; ++k)
            s.rho.at(x, k) = std::cos(g.x_coord(x)) * (1.0 + 0.5 * std::sin(kTwoPi * g.z_coord(k)));
    }
    const auto [E3, D3] = engine.energy_kinetic(s, 3);
    const auto [E4, D4] = engine.energy_kinetic(s, 4);
    CHECK(E4 >= E3);
    CHECK(D4 >= D3);
    CHECK(E3 >= 0.0);
    CHECK(D3 >= 0.0);
}

TEST_CASE("gronwall audit: pure decay run needs no constant at all") {
    const PeriodicGrid g = grid_1d(64, 8);
    const ModelParams p = kinetic_params();
    KineticSolver solver(g, p);
    KineticState s;
    s.rho = KineticField(g);
    s.n = ScalarField(g);
    s.h = ScalarField(g);
    for (int i = 0; i < g.n_x; ++i) s.h[i] = 0.5 * std::cos(g.x_coord(i));
    StepControl ctl;
    ctl.t_end = 0.5;
    ctl.snapshot_every = 10;
    DiagnosticsEngine engine(g, p, solver.constants(), RunKind::Kinetic);
    auto run = solver.run(s, ctl, &engine);
    REQUIRE(run.records.size() >= 10);
    const GronwallAudit audit = gronwall_audit(run.records, p.eps, p.sobolev_s);
    CHECK(audit.violations == 0);
    CHECK(audit.C <= 1e-6);
}

TEST_CASE("gronwall audit is stable under record refinement and eps halving") {
    const PeriodicGrid g = grid_1d(32, 16);
    ModelParams p = kinetic_params();
    // growth-dominated settled run: after the z-profile transient the energy
    // is a clean exponential and the audited ratio is flat in time, so C
    // measures the trajectory rather than the position of the window edge
    p.gamma = 100.0;
    p.xi = 1e-3;
    KineticSolver solver(g, p);
    KineticState s;
    s.rho = KineticField(g);
    s.h = ScalarField(g);
    s.n = ScalarField(g, 0.02);
    for (int x = 0; x < g.n_x; ++x)
        for (int k = 0; k < g.n_z; ++k)
            s.rho.at(x, k) = 2e-8 * (1.0 + 0.3 * std::sin(g.x_coord(x)));
    StepControl warm;
    warm.dt = 1e-3;
    warm.t_end = 2.0;
    warm.snapshot_every = 1000000;
    KineticState s1 = solver.run(s, warm).final_state;
    s1.t = 0.0;

    DiagnosticsEngine engine(g, p, solver.constants(), RunKind::Kinetic);
    StepControl ctl;
    ctl.dt = 1e-3;
    ctl.t_end = 0.2;
    ctl.snapshot_every = 20;
    auto coarse = solver.run(s1, ctl, &engine);
    ctl.snapshot_every = 10;
    auto fine = solver.run(s1, ctl, &engine);
    const double C_coarse = gronwall_audit(coarse.records, p.eps, p.sobolev_s).C;
    const double C_fine = gronwall_audit(fine.records, p.eps, p.sobolev_s).C;
    CHECK(C_coarse > 0.0);
    CHECK(std::isfinite(C_coarse));
    CHECK(std::abs(C_fine / C_coarse - 1.0) < 0.2);

    // halving eps doubles the z-flux contribution at most; the audit's
    // (1 + 1/eps) prefactor absorbs it, so C moves by less than a factor 2.5
    ModelParams ph = p;
    ph.eps = 0.5;
    KineticSolver solver_h(g, ph);
    DiagnosticsEngine engine_h(g, ph, solver_h.constants(), RunKind::Kinetic);
    ctl.snapshot_every = 20;
    auto half = solver_h.run(s1, ctl, &engine_h);
    const double C_half = gronwall_audit(half.records, ph.eps, ph.sobolev_s).C;
    CHECK(std::isfinite(C_half));
    CHECK(C_half <= 2.5 * C_coarse + 1e-9);
    CHECK(C_half >= 0.2 * C_coarse);

    CHECK_THROWS_AS(
        gronwall_audit(std::vector<DiagnosticsRecord>(coarse.records.begin(),
                                                      coarse.records.begin() + 5),
                       p.eps, p.sobolev_s),
        ResolutionError);
}

TEST_CASE("exponential rate fits: exact series, constants, error paths") {
    std::vector<double> ts, vs;
    for (int i = 0; i <= 50; ++i) {
        ts.push_back(0.01 * i);
        vs.push_back(2.0 * std::exp(-3.25 * 0.01 * i));
    }
    const RateFit fit = fit_exponential_rate(ts, vs, 0.1);
    CHECK(fit.rate == doctest::Approx(-3.25).epsilon(1e-10));
    CHECK(fit.residual <= 1e-10);

    std::vector<double> cs(ts.size(), 0.7);
    CHECK(fit_exponential_rate(ts, cs, 0.0).rate == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    std::vector<double> bad = vs;
    bad[30] = 0.0;
    CHECK_THROWS_AS(fit_exponential_rate(ts, bad, 0.0), InvalidParameterError);
}

TEST_CASE("second z-moment of a narrow Gaussian recovers sigma^2") {
    const PeriodicGrid g = grid_1d(8, 512);
    ModelParams p = kinetic_params();
    const HypothesisConstants hc = hypothesis_constants(p, 512);
    DiagnosticsEngine engine(g, p, hc, RunKind::Kinetic);
    KineticState s;
    s.rho = KineticField(g);
    s.h = ScalarField(g, p.h_bar);  // L = Z_w / 2
    s.n = ScalarField(g);
    const double sigma = 0.04;
    for (int x = 0; x < g.x_nodes(); ++x)
        for (int k = 0; k < g.n_z; ++k) {
            const double d = g.z_coord(k) - 0.5 * g.Z_w;
            s.rho.at(x, k) = std::exp(-0.5 * d * d / (sigma * sigma));
        }
    CHECK(engine.second_z_moment(s) == doctest::Approx(sigma * sigma).epsilon(1e-3));
}

TEST_CASE("diagnostics CSV carries a full header and 17-digit reproducible rows") {
    const PeriodicGrid g = grid_1d(16, 8);
    const ModelParams p = kinetic_params();
    KineticSolver solver(g, p);
    KineticState s;
    s.rho = KineticField(g, 0.25);
    s.h = ScalarField(g, 0.125);
    s.n = ScalarField(g, 1.0);
    StepControl ctl;
    ctl.t_end = 0.02;
    ctl.snapshot_every = 2;
    DiagnosticsEngine engine(g, p, solver.constants(), RunKind::Kinetic);
    auto run = solver.run(s, ctl, &engine);
    std::ostringstream a, b;
    write_diagnostics_csv(a, run.records);
    write_diagnostics_csv(b, run.records);
    CHECK(a.str() == b.str());
    const std::string header = a.str().substr(0, a.str().find('\n'));
    for (const char* name : {"t", "mass_rho", "mass_n", "combined_invariant", "min_rho", "min_h",
                             "min_n", "E_L", "D_L", "m2_z", "mode_rho_0", "mode_h_4", "mode_n_2"})
        CHECK(header.find(name) != std::string::npos);
    // values round-trip through 17 significant digits
    std::istringstream rows(a.str().substr(a.str().find('\n') + 1));
    std::string line;
    std::getline(rows, line);
    const double t0 = std::strtod(line.c_str(), nullptr);
    CHECK(t0 == run.records.front().t);
}
