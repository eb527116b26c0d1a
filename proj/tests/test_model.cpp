#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "stripelab/errors.hpp"
#include "stripelab/model.hpp"

using namespace stripelab;

namespace {

// Frozen oracle values, adaptive quadrature of exp(1/(s^2-1)) on (-1,1) to
// 1e-12 (cross-checked against 30-digit arithmetic).
constexpr double kKappa0 = 0.44399381616807944;
constexpr double kBumpAtZero = 0.82856883986910515;  // e^{-1} / kappa0

ModelParams base_params() {
    ModelParams p;
    p.Z_w = 1.0;
    p.h_bar = 1.0;
    p.ell = 0.25;
    return p;
}

// Independent quadrature oracle: composite Gauss-Legendre (5-point) panels.
double gauss_integrate(double (*f)(double, double), double ell, double a, double b, int panels) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int q = 0; q < 5; ++q) acc += 0.5 * h * ws[q] * f(mid + 0.5 * h * xs[q], ell);
    }
    return acc;
}

double phi_wrap(double x, double ell) { return mollifier_phi(x, ell); }

}  // namespace

TEST_CASE("bump normalizer matches the frozen quadrature value") {
    CHECK(bump_normalizer() == doctest::Approx(kKappa0).epsilon(1e-11));
    // independent oracle: Gauss-Legendre of the raw bump
    auto raw = [](double s, double) { return std::abs(s) < 1.0 ? std::exp(1.0 / (s * s - 1.0)) : 0.0; };
    CHECK(gauss_integrate(raw, 0.0, -1.0, 1.0, 4096) == doctest::Approx(bump_normalizer()).epsilon(1e-11));
}

TEST_CASE("mollifier support, normalization and center value") {
    CHECK(mollifier_phi(1.0, 1.0) == 0.0);
    CHECK(mollifier_phi(-1.0, 1.0) == 0.0);
    CHECK(mollifier_phi(0.35, 0.25) == 0.0);
    for (double ell : {0.1, 1.0}) {
        const double integral = gauss_integrate(&phi_wrap, ell, -ell, ell, 8192);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(mollifier_phi(0.0, 1.0) == doctest::Approx(kBumpAtZero).epsilon(1e-10));
    CHECK_THROWS_AS(mollifier_phi(0.0, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(mollifier_phi(0.0, -1.0), InvalidParameterError);
}

TEST_CASE("smoothed switch saturates, is monotone and point-symmetric") {
    const ModelParams p = base_params();
    CHECK(smoothed_switch_L(p.h_bar - p.ell, p) == doctest::Approx(p.Z_w).epsilon(1e-14));
    CHECK(smoothed_switch_L(p.h_bar + p.ell, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(smoothed_switch_L(0.0, p) == p.Z_w);
    CHECK(smoothed_switch_L(10.0, p) == 0.0);
    CHECK(smoothed_switch_L(p.h_bar, p) == doctest::Approx(0.5 * p.Z_w).epsilon(1e-10));
    // point symmetry about (h_bar, Z_w/2)
    for (double frac : {0.5, 0.25, 0.8}) {
        const double d = frac * p.ell;
        const double s = smoothed_switch_L(p.h_bar - d, p) + smoothed_switch_L(p.h_bar + d, p);
        CHECK(s == doctest::Approx(p.Z_w).epsilon(1e-10));
    }
    double prev = p.Z_w + 1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double h = p.h_bar - 1.5 * p.ell + 3.0 * p.ell * i / 2000.0;
        const double v = smoothed_switch_L(h, p);
        CHECK(v <= prev + 1e-14);
        CHECK(v >= 0.0);
        CHECK(v <= p.Z_w);
        prev = v;
    }
}

TEST_CASE("smoothed switch converges pointwise to the step as ell shrinks") {
    ModelParams p = base_params();
    for (double h : {0.7, 0.9, 1.05, 1.3}) {
        double prev_err = 2.0;
        for (double ell : {0.1, 0.01, 0.001}) {
            p.ell = ell;
            const double step = h < p.h_bar ? p.Z_w : 0.0;
            const double err = std::abs(smoothed_switch_L(h, p) - step);
            CHECK(err <= prev_err + 1e-15);
            prev_err = err;
        }
        p.ell = 0.001;
        const double step = h < p.h_bar ? p.Z_w : 0.0;
        CHECK(std::abs(smoothed_switch_L(h, p) - step) < 1e-12);
    }
}

TEST_CASE("switch derivative: support, finite-difference oracle, center value") {
    const ModelParams p = base_params();
    CHECK(smoothed_switch_L_prime(p.h_bar - 2.0 * p.ell, p) == 0.0);
    CHECK(smoothed_switch_L_prime(p.h_bar + 2.0 * p.ell, p) == 0.0);
    const double expected_center = -p.Z_w * std::exp(-1.0) / (bump_normalizer() * p.ell);
    CHECK(smoothed_switch_L_prime(p.h_bar, p) == doctest::Approx(expected_center).epsilon(1e-12));
    // centered finite differences of L at 21 interior points, step 1e-6 ell
    const double step = 1e-6 * p.ell;
    for (int i = 1; i <= 21; ++i) {
        const double h = p.h_bar - p.ell + 2.0 * p.ell * i / 22.0;
        const double fd =
            (smoothed_switch_L(h + step, p) - smoothed_switch_L(h - step, p)) / (2.0 * step);
        const double an = smoothed_switch_L_prime(h, p);
        CHECK(fd == doctest::Approx(an).epsilon(1e-6));
    }
}

TEST_CASE("switch derivative bounds scale like C / ell^k") {
    ModelParams p = base_params();
    const std::vector<double> ells{0.2, 0.1, 0.05, 0.025};
    for (int k : {1, 2}) {
        double fitted_C = 0.0;
        for (double ell : ells) {
            p.ell = ell;
            double sup = 0.0;
            for (int i = 0; i <= 800; ++i) {
                const double h = p.h_bar - ell + 2.0 * ell * i / 800.0;
                const Jet j = chez_switch(p).jet(h, k);
                sup = std::max(sup, std::abs(j.derivative(k)));
            }
            fitted_C = std::max(fitted_C, sup * std::pow(ell, k));
        }
        // the same C must work across the whole ell sequence
        for (double ell : ells) {
            p.ell = ell;
            double sup = 0.0;
            for (int i = 0; i <= 800; ++i) {
                const double h = p.h_bar - ell + 2.0 * ell * i / 800.0;
                const Jet j = chez_switch(p).jet(h, k);
                sup = std::max(sup, std::abs(j.derivative(k)));
            }
            CHECK(sup <= fitted_C / std::pow(ell, k) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("CheZ flux: direct values, fixed point, exact z-slope") {
    ModelParams p = base_params();
    p.k_V = 2.0;
    CHECK(chez_flux_g(0.25, 0.0, p) == doctest::Approx(1.5).epsilon(1e-14));
    for (double h : {0.0, 0.9, 1.0, 1.1, 5.0}) {
        const double L = smoothed_switch_L(h, p);
        CHECK(chez_flux_g(L, h, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    }
    p.k_V = 1.0;
    CHECK(chez_flux_g(0.5, p.h_bar + p.ell, p) == doctest::Approx(-0.5).epsilon(1e-14));
    // g is affine in z, so divided differences recover -k_V to rounding
    for (double h : {0.2, 1.0, 1.4}) {
        const double g1 = chez_flux_g(0.25, h, p);
        const double g2 = chez_flux_g(0.75, h, p);
        CHECK((g2 - g1) / 0.5 == doctest::Approx(-p.k_V).epsilon(1e-12));
    }
    CHECK_THROWS_AS(chez_flux_g(-0.1, 0.0, p), InvalidParameterError);
    CHECK_THROWS_AS(chez_flux_g(1.5, 0.0, p), InvalidParameterError);
}

TEST_CASE("motility: direct substitutions and positivity") {
    ModelParams p = base_params();
    CHECK(motility_D(0.3, p) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    p.s0 = 2.0;
    p.lambda_c = 1.0;
    p.mu_c = 3.0;
    CHECK(motility_D(0.5, p) == doctest::Approx(1.0).epsilon(1e-14));
    ModelParams pc = base_params();
    pc.motility_profile = MotilityProfile::Cosine;
    pc.lambda_c = 2.0;
    pc.lambda_a = 1.0;
    CHECK(motility_D(0.0, pc) == doctest::Approx(1.0 / 36.0).epsilon(1e-14));
    // strictly positive along the period
    for (int i = 0; i <= 512; ++i) CHECK(motility_D(i / 512.0, pc) > 0.0);
    // a non-positive switching-rate profile is a configuration error
    ModelParams bad = pc;
    bad.lambda_c = 0.5;  // lambda0 dips negative near z = Z_w/2... caught on evaluation
    CHECK_THROWS_AS(motility_D(0.5, bad), ModelConfigError);
}

TEST_CASE("composed motility saturates at the switch levels and stays above d") {
    ModelParams p = base_params();
    p.motility_profile = MotilityProfile::Cosine;
    p.lambda_c = 2.0;
    p.lambda_a = 1.0;
    CHECK(composed_motility_Dtilde(p.h_bar - 2.0 * p.ell, p) ==
          doctest::Approx(motility_D(p.Z_w, p)).epsilon(1e-14));
    CHECK(composed_motility_Dtilde(p.h_bar + 2.0 * p.ell, p) ==
          doctest::Approx(motility_D(0.0, p)).epsilon(1e-14));
    ModelParams pconst = base_params();
    for (double h : {0.0, 0.5, 1.0, 1.5})
        CHECK(composed_motility_Dtilde(h, pconst) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    // inf over h of Dtilde never falls below the sampled inf of D
    const HypothesisConstants hc = hypothesis_constants(p, 4096);
    double min_dt = 1e300;
    for (int i = 0; i < 10000; ++i) {
        const double h = -0.5 + 3.0 * i / 9999.0;
        min_dt = std::min(min_dt, composed_motility_Dtilde(h, p));
    }
    CHECK(min_dt >= hc.d - 1e-12);
}

TEST_CASE("jet derivatives agree with closed forms") {
    // f(z) = cos(2 pi z), derivatives cycle with factors (2 pi)^k
    const double w = 6.283185307179586476925287;
    Jet z = Jet::variable(0.2, 4);
    Jet c = cos(z * w);
    CHECK(c.derivative(0) == doctest::Approx(std::cos(w * 0.2)).epsilon(1e-13));
    CHECK(c.derivative(1) == doctest::Approx(-w * std::sin(w * 0.2)).epsilon(1e-13));
    CHECK(c.derivative(2) == doctest::Approx(-w * w * std::cos(w * 0.2)).epsilon(1e-13));
    CHECK(c.derivative(3) == doctest::Approx(w * w * w * std::sin(w * 0.2)).epsilon(1e-13));
    // exp(1/(s^2-1)) jet against high-order finite differences of the bump
    const double s0 = 0.3;
    const Jet b = bump_jet(s0, 2);
    const double h = 1e-5;
    const double fd1 = (bump(s0 + h) - bump(s0 - h)) / (2.0 * h);
    const double fd2 = (bump(s0 + h) - 2.0 * bump(s0) + bump(s0 - h)) / (h * h);
    CHECK(b.derivative(1) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(b.derivative(2) == doctest::Approx(fd2).epsilon(1e-5));
}

TEST_CASE("hypothesis constants: constant profile is exact") {
    ModelParams p = base_params();
    const HypothesisConstants hc = hypothesis_constants(p, 1024);
    CHECK(hc.d == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(hc.a == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(hc.eta == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(hc.C_p == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hc.kappa0 == doctest::Approx(kKappa0).epsilon(1e-11));
    CHECK(hc.n_samples == 1024);
}

TEST_CASE("Lambda_b closed form and monotonicities") {
    CHECK(lambda_b_closed_form(1, 1, 1, 1, 1, 1) == doctest::Approx(4.0).epsilon(1e-14));
    const double base = lambda_b_closed_form(1.0, 0.5, 2.0, 1.5, 1.0, 3.0);
    CHECK(lambda_b_closed_form(1.0, 0.5, 2.0, 1.5, 1.0, 4.0) < base);   // decreasing in b
    CHECK(lambda_b_closed_form(1.0, 0.6, 2.0, 1.5, 1.0, 3.0) > base);   // increasing in d
    CHECK(lambda_b_closed_form(1.0, 0.5, 2.5, 1.5, 1.0, 3.0) > base);   // increasing in D_h
    CHECK(lambda_b_closed_form(1.2, 0.5, 2.0, 1.5, 1.0, 3.0) > base);   // increasing in beta
}

TEST_CASE("b and c1 blow up monotonically as ell shrinks") {
    ModelParams p = base_params();
    p.motility_profile = MotilityProfile::Cosine;
    p.lambda_c = 2.0;
    p.lambda_a = 1.0;
    double prev_b = 0.0, prev_c1 = 0.0;
    for (double ell : {0.2, 0.1, 0.05}) {
        p.ell = ell;
        const HypothesisConstants hc = hypothesis_constants(p, 2048);
        CHECK(hc.b > prev_b);
        CHECK(hc.c1 > prev_c1);
        prev_b = hc.b;
        prev_c1 = hc.c1;
    }
}

TEST_CASE("hypothesis constants reject tiny sample counts") {
    CHECK_THROWS_AS(hypothesis_constants(base_params(), 255), ResolutionError);
}

TEST_CASE("parameter validation") {
    ModelParams p = base_params();
    p.eps = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "eps must be positive (got 0)", InvalidParameterError);
    p = base_params();
    p.ell = 2.0;  // >= h_bar
    CHECK_THROWS_AS(p.validate(), InvalidParameterError);
    p = base_params();
    p.sobolev_s = 3;
    CHECK_NOTHROW(p.validate(false));
    CHECK_THROWS_AS(p.validate(true), InvalidParameterError);
}
