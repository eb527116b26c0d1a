#pragma once

#include <vector>

#include "stripelab/jet.hpp"

namespace stripelab {

enum class MotilityProfile { Constant, Cosine };

/// All physical and numerical coefficients of the kinetic and macroscopic
/// systems, plus the switching-rate profile family that defines D(z).
struct ModelParams {
    double gamma = 1.0;  // cell growth rate
    double D_h = 1.0;    // AHL diffusion
    double D_n = 1.0;    // nutrient diffusion
    double alpha = 1.0;  // AHL production
    double beta = 1.0;   // AHL degradation
    double xi = 1.0;     // nutrient consumption
    double k_V = 1.0;    // cell-volume growth rate
    double Z_w = 1.0;    // wild-type CheZ level, z-period
    double h_bar = 1.0;  // AHL suppression threshold
    double ell = 0.25;   // mollification half-width, must stay below h_bar
    double s0 = 1.0;     // cell speed
    double eps = 1.0;    // CheZ response-speed parameter
    int sobolev_s = 4;   // >= 3 for kinetic runs, >= 4 for macroscopic ones

    // reference reaction-diffusion model coefficients
    double hill_K_h = 1.0;
    double hill_K_n = 1.0;
    double hill_k_n = 1.0;
    double hill_D_rho = 0.25;
    double hill_D_rho0 = 0.025;

    MotilityProfile motility_profile = MotilityProfile::Constant;
    double lambda_c = 1.0;  // run->tumble base rate
    double lambda_a = 0.0;  // cosine modulation amplitude, |lambda_a| < lambda_c
    double mu_c = 1.0;      // tumble->run base rate
    double mu_a = 0.0;

    /// Throws InvalidParameterError on any violated invariant.
    /// Macroscopic runs additionally require sobolev_s >= 4.
    void validate(bool macroscopic = false) const;

    bool operator==(const ModelParams&) const = default;
};

/// Sampled/derived constants of hypotheses (H1)-(H2) and the dissipativity
/// threshold. Produced by hypothesis_constants().
struct HypothesisConstants {
    double a = 0.0;        // sum over i<=s of sup|D^(i)|
    double b = 0.0;        // sup over omega of sum |Dtilde^(i)|
    double c1 = 0.0;       // sum over 1<=i<=s of sup |d^i g / d omega^i|
    double d = 0.0;        // inf D
    double sup_D = 0.0;    // sup D (used for macro CFL)
    double eta = 0.0;      // ||D-d||^2_{L2_z} / d^2
    double kappa0 = 0.0;   // mollifier normalizer
    double C_p = 1.0;      // Poincare constant of the spatial torus
    double Lambda_b = 0.0; // 4 beta d^{3/2} D_h / (alpha^2 C_p^2 b)
    int n_samples = 0;     // sampling density used for the sup/inf estimates
};

/// kappa0 = integral over (-1,1) of exp(1/(s^2-1)), by adaptive Simpson to 1e-12.
double bump_normalizer();

/// Normalized bump: exp(1/(s^2-1))/kappa0 on (-1,1), zero outside.
double bump(double s);

/// CDF of the normalized bump, tabulated (4096 Simpson panels, monotone cubic
/// interpolation with analytic slopes; absolute error < 1e-10).
double bump_cdf(double s);

/// Taylor jet of the normalized bump at s (all coefficients zero for |s| >= 1).
Jet bump_jet(double s, int order);

/// phi_ell(varsigma) = bump(varsigma/ell)/ell. Throws on ell <= 0.
double mollifier_phi(double varsigma, double ell);

/// k-th derivative of phi_ell at varsigma.
double mollifier_phi_derivative(double varsigma, double ell, int k);

/// Mollified two-level switch: equals `high` for h <= threshold - width,
/// `low` for h >= threshold + width, smooth and monotone in between.
class SmoothedSwitch {
  public:
    SmoothedSwitch(double high, double low, double threshold, double width);

    double value(double h) const;
    double derivative(double h) const;  // d/dh, = (low-high) * phi_width(h-threshold)
    Jet jet(double h, int order) const;

    double high() const { return high_; }
    double low() const { return low_; }

  private:
    double high_, low_, threshold_, width_;
};

/// The mollified CheZ steady level L_ell: Z_w below h_bar, 0 above.
SmoothedSwitch chez_switch(const ModelParams& p);

/// The reference model's AHL-dependent mobility (levels hill_D_rho / hill_D_rho0 at hill_K_h).
SmoothedSwitch science_mobility_switch(const ModelParams& p);

double smoothed_switch_L(double h, const ModelParams& p);
double smoothed_switch_L_prime(double h, const ModelParams& p);

/// Intracellular CheZ flux g(z,h) = k_V (L_ell(h) - z). Requires z in [0, Z_w].
double chez_flux_g(double z, double h, const ModelParams& p);

double switching_rate_lambda0(double z, const ModelParams& p);
double switching_rate_mu0(double z, const ModelParams& p);

/// Motility D(z) = s0^2 mu0 / (3 lambda0 (mu0 + lambda0)). Requires z in [0, Z_w].
double motility_D(double z, const ModelParams& p);
Jet motility_D_jet(const Jet& z, const ModelParams& p);

/// Composed motility Dtilde(h) = D(L_ell(h)).
double composed_motility_Dtilde(double h, const ModelParams& p);
Jet composed_motility_Dtilde_jet(double h, int order, const ModelParams& p);

/// Closed form of the dissipativity threshold.
double lambda_b_closed_form(double beta, double d, double D_h, double alpha, double C_p, double b);

/// Dense-sampling estimate of the hypothesis constants. Derivatives up to
/// sobolev_s come from Taylor jets. spatial_period fixes C_p (first nonzero
/// Fourier mode). Requires n_samples >= 256.
HypothesisConstants hypothesis_constants(const ModelParams& p, int n_samples,
                                         double spatial_period = 6.283185307179586476925287);

}  // namespace stripelab
