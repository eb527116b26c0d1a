#include "stripelab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "stripelab/errors.hpp"

namespace stripelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump_raw(double s) {
    const double q = s * s - 1.0;
    if (q >= 0.0) return 0.0;
    if (q > -1e-12) return 0.0;  // exp(1/q) underflows long before this
    return std::exp(1.0 / q);
}

double adaptive_simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_bump_raw(double a, double b, double tol) {
    const double fa = bump_raw(a);
    const double fb = bump_raw(b);
    const double fm = bump_raw(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(&bump_raw, a, b, fa, fm, fb, whole, tol, 48);
}

// Cumulative table of the normalized bump on [-1,1]: values plus analytic
// slopes, evaluated through monotonicity-clamped cubic Hermite pieces.
struct BumpTable {
    static constexpr int kPanels = 4096;
    double kappa0 = 0.0;
    std::array<double, kPanels + 1> cdf{};
    std::array<double, kPanels + 1> slope{};  // d(cdf)/ds = normalized bump at node

    BumpTable() {
        kappa0 = integrate_bump_raw(-1.0, 0.0, 5e-13) + integrate_bump_raw(0.0, 1.0, 5e-13);
        const double h = 2.0 / kPanels;
        std::array<double, kPanels + 1> node{};
        for (int k = 0; k <= kPanels; ++k) node[k] = -1.0 + k * h;
        double acc = 0.0;
        cdf[0] = 0.0;
        for (int k = 0; k < kPanels; ++k) {
            const double fa = bump_raw(node[k]);
            const double fm = bump_raw(0.5 * (node[k] + node[k + 1]));
            const double fb = bump_raw(node[k + 1]);
            acc += h / 6.0 * (fa + 4.0 * fm + fb);
            cdf[k + 1] = acc;
        }
        const double total = cdf[kPanels];  // table's own Simpson estimate of kappa0
        for (int k = 0; k <= kPanels; ++k) {
            cdf[k] /= total;
            slope[k] = bump_raw(node[k]) / total;
        }
        cdf[kPanels] = 1.0;
        // Fritsch-Carlson clamp; inactive for this smooth CDF except possibly
        // at the flat support edges.
        for (int k = 0; k < kPanels; ++k) {
            const double sec = (cdf[k + 1] - cdf[k]) / h;
            if (sec <= 0.0) {
                slope[k] = 0.0;
                slope[k + 1] = 0.0;
                continue;
            }
            const double al = slope[k] / sec;
            const double be = slope[k + 1] / sec;
            const double r2 = al * al + be * be;
            if (r2 > 9.0) {
                const double tscale = 3.0 / std::sqrt(r2);
                slope[k] *= tscale;
                slope[k + 1] *= tscale;
            }
        }
    }

    double eval_cdf(double s) const {
        if (s <= -1.0) return 0.0;
        if (s >= 1.0) return 1.0;
        const double h = 2.0 / kPanels;
        int k = static_cast<int>((s + 1.0) / h);
        k = std::clamp(k, 0, kPanels - 1);
        const double sk = -1.0 + k * h;
        const double t = (s - sk) / h;
        const double y0 = cdf[k], y1 = cdf[k + 1];
        const double m0 = slope[k] * h, m1 = slope[k + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
               (t3 - t2) * m1;
    }
};

const BumpTable& bump_table() {
    static const BumpTable table;
    return table;
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << name << " must be positive (got " << v << ")";
        throw InvalidParameterError(os.str());
    }
}

}  // namespace

void ModelParams::validate(bool macroscopic) const {
    require_positive(gamma, "gamma");
    require_positive(D_h, "D_h");
    require_positive(D_n, "D_n");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    require_positive(xi, "xi");
    require_positive(k_V, "k_V");
    require_positive(Z_w, "Z_w");
    require_positive(h_bar, "h_bar");
    require_positive(ell, "ell");
    require_positive(s0, "s0");
    require_positive(eps, "eps");
    require_positive(hill_K_h, "hill_K_h");
    require_positive(hill_K_n, "hill_K_n");
    require_positive(hill_k_n, "hill_k_n");
    require_positive(hill_D_rho, "hill_D_rho");
    require_positive(hill_D_rho0, "hill_D_rho0");
    if (!(ell < h_bar)) throw InvalidParameterError("ell must be smaller than h_bar");
    if (!(lambda_c > std::abs(lambda_a)))
        throw InvalidParameterError("lambda_c must exceed |lambda_a|");
    if (!(mu_c > std::abs(mu_a))) throw InvalidParameterError("mu_c must exceed |mu_a|");
    const int min_s = macroscopic ? 4 : 3;
    if (sobolev_s < min_s) {
        std::ostringstream os;
        os << "sobolev_s must be >= " << min_s << (macroscopic ? " for macroscopic runs" : "")
           << " (got " << sobolev_s << ")";
        throw InvalidParameterError(os.str());
    }
}

double bump_normalizer() { return bump_table().kappa0; }

double bump(double s) { return bump_raw(s) / bump_table().kappa0; }

double bump_cdf(double s) { return bump_table().eval_cdf(s); }

Jet bump_jet(double s, int order) {
    Jet zero(order);
    if (std::abs(s) >= 1.0) return zero;
    if (1.0 - s * s < 1e-8) return zero;  // value and all derivatives below underflow
    const Jet sj = Jet::variable(s, order);
    const Jet u = (sj * sj - 1.0).reciprocal();
    return exp(u) / bump_table().kappa0;
}

double mollifier_phi(double varsigma, double ell) {
    if (!(ell > 0.0)) throw InvalidParameterError("mollifier_phi: ell must be positive");
    return bump(varsigma / ell) / ell;
}

double mollifier_phi_derivative(double varsigma, double ell, int k) {
    if (!(ell > 0.0)) throw InvalidParameterError("mollifier_phi_derivative: ell must be positive");
    const Jet b = bump_jet(varsigma / ell, k);
    return b.derivative(k) / std::pow(ell, k + 1);
}

SmoothedSwitch::SmoothedSwitch(double high, double low, double threshold, double width)
    : high_(high), low_(low), threshold_(threshold), width_(width) {
    if (!(width > 0.0)) throw InvalidParameterError("SmoothedSwitch: width must be positive");
}

double SmoothedSwitch::value(double h) const {
    const double s = (h - threshold_) / width_;
    return low_ + (high_ - low_) * (1.0 - bump_cdf(s));
}

double SmoothedSwitch::derivative(double h) const {
    return (low_ - high_) * bump(( h - threshold_) / width_) / width_;
}

Jet SmoothedSwitch::jet(double h, int order) const {
    Jet j(order);
    j.coeff(0) = value(h);
    if (order >= 1) {
        // value^(k) = (low-high) * phi_width^(k-1)(h-threshold)
        const Jet b = bump_jet((h - threshold_) / width_, order - 1);
        double fact = 1.0;  // k!
        double wpow = width_;  // width^k
        for (int k = 1; k <= order; ++k) {
            fact *= k;
            const double phi_deriv = b.derivative(k - 1) / wpow;  // phi_w^(k-1)
            j.coeff(k) = (low_ - high_) * phi_deriv / fact;
            wpow *= width_;
        }
    }
    return j;
}

SmoothedSwitch chez_switch(const ModelParams& p) { return {p.Z_w, 0.0, p.h_bar, p.ell}; }

SmoothedSwitch science_mobility_switch(const ModelParams& p) {
    return {p.hill_D_rho, p.hill_D_rho0, p.hill_K_h, p.ell};
}

double smoothed_switch_L(double h, const ModelParams& p) { return chez_switch(p).value(h); }

double smoothed_switch_L_prime(double h, const ModelParams& p) {
    return -p.Z_w * mollifier_phi(h - p.h_bar, p.ell);
}

double chez_flux_g(double z, double h, const ModelParams& p) {
    if (z < 0.0 || z > p.Z_w) throw InvalidParameterError("chez_flux_g: z outside [0, Z_w]");
    return p.k_V * (smoothed_switch_L(h, p) - z);
}

double switching_rate_lambda0(double z, const ModelParams& p) {
    if (p.motility_profile == MotilityProfile::Constant) return p.lambda_c;
    return p.lambda_c + p.lambda_a * std::cos(2.0 * kPi * z / p.Z_w);
}

double switching_rate_mu0(double z, const ModelParams& p) {
    if (p.motility_profile == MotilityProfile::Constant) return p.mu_c;
    return p.mu_c + p.mu_a * std::cos(2.0 * kPi * z / p.Z_w);
}

double motility_D(double z, const ModelParams& p) {
    if (z < 0.0 || z > p.Z_w) throw InvalidParameterError("motility_D: z outside [0, Z_w]");
    const double lam = switching_rate_lambda0(z, p);
    const double mu = switching_rate_mu0(z, p);
    if (!(lam > 0.0) || !(mu > 0.0))
        throw ModelConfigError("motility_D: switching rates must be positive on [0, Z_w]");
    return p.s0 * p.s0 * mu / (3.0 * lam * (mu + lam));
}

Jet motility_D_jet(const Jet& z, const ModelParams& p) {
    const int n = z.order();
    Jet lam(n), mu(n);
    if (p.motility_profile == MotilityProfile::Constant) {
        lam = Jet::constant(p.lambda_c, n);
        mu = Jet::constant(p.mu_c, n);
    } else {
        const Jet arg = z * (2.0 * kPi / p.Z_w);
        lam = Jet::constant(p.lambda_c, n) + p.lambda_a * cos(arg);
        mu = Jet::constant(p.mu_c, n) + p.mu_a * cos(arg);
    }
    if (!(lam.value() > 0.0) || !(mu.value() > 0.0))
        throw ModelConfigError("motility_D: switching rates must be positive on [0, Z_w]");
    return (p.s0 * p.s0) * mu / (3.0 * (lam * (mu + lam)));
}

double composed_motility_Dtilde(double h, const ModelParams& p) {
    return motility_D(smoothed_switch_L(h, p), p);
}

Jet composed_motility_Dtilde_jet(double h, int order, const ModelParams& p) {
    const Jet L = chez_switch(p).jet(h, order);
    return motility_D_jet(L, p);
}

double lambda_b_closed_form(double beta, double d, double D_h, double alpha, double C_p,
                            double b) {
    return 4.0 * beta * std::pow(d, 1.5) * D_h / (alpha * alpha * C_p * C_p * b);
}

HypothesisConstants hypothesis_constants(const ModelParams& p, int n_samples,
                                         double spatial_period) {
    if (n_samples < 256)
        throw ResolutionError("hypothesis_constants: n_samples must be >= 256");
    const int s = p.sobolev_s;
    HypothesisConstants hc;
    hc.n_samples = n_samples;
    hc.kappa0 = bump_normalizer();
    hc.C_p = spatial_period / (2.0 * kPi);

    // z sweep over the periodic nodes i*dz (z = 0 covers z = Z_w too):
    // a (sum of per-order sups), d, sup_D, eta.
    std::vector<double> sup_Di(static_cast<std::size_t>(s) + 1, 0.0);
    double inf_D = std::numeric_limits<double>::infinity();
    double sup_D = 0.0;
    double sq_acc = 0.0;
    const double dz = p.Z_w / n_samples;
    std::vector<double> D_vals(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double z = i * dz;
        const Jet D = motility_D_jet(Jet::variable(z, s), p);
        for (int k = 0; k <= s; ++k)
            sup_Di[k] = std::max(sup_Di[k], std::abs(D.derivative(k)));
        inf_D = std::min(inf_D, D.value());
        sup_D = std::max(sup_D, D.value());
        D_vals[i] = D.value();
    }
    hc.d = inf_D;
    hc.sup_D = sup_D;
    for (double v : sup_Di) hc.a += v;
    for (double v : D_vals) sq_acc += (v - inf_D) * (v - inf_D);
    hc.eta = sq_acc * dz / (inf_D * inf_D);

    // omega sweep over the switch transition (Dtilde and L are constant outside).
    std::vector<double> sup_Li(static_cast<std::size_t>(s) + 1, 0.0);
    double b_sup = std::max(motility_D(0.0, p), motility_D(p.Z_w, p));
    const double w0 = p.h_bar - p.ell, w1 = p.h_bar + p.ell;
    const double dw = (w1 - w0) / n_samples;
    for (int i = 0; i <= n_samples; ++i) {
        const double w = w0 + i * dw;
        const Jet Dt = composed_motility_Dtilde_jet(w, s, p);
        double acc = 0.0;
        for (int k = 0; k <= s; ++k) acc += std::abs(Dt.derivative(k));
        b_sup = std::max(b_sup, acc);
        const Jet L = chez_switch(p).jet(w, s);
        for (int k = 1; k <= s; ++k)
            sup_Li[k] = std::max(sup_Li[k], std::abs(L.derivative(k)));
    }
    hc.b = b_sup;
    for (int k = 1; k <= s; ++k) hc.c1 += p.k_V * sup_Li[k];

    hc.Lambda_b = lambda_b_closed_form(p.beta, hc.d, p.D_h, p.alpha, hc.C_p, hc.b);
    return hc;
}

}  // namespace stripelab
