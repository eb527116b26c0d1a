#include "stripelab/stability.hpp"

#include <algorithm>
#include <cmath>

#include "stripelab/errors.hpp"

namespace stripelab {

namespace {

double m_sq(std::array<int, 2> m) {
    return static_cast<double>(m[0]) * m[0] + static_cast<double>(m[1]) * m[1];
}

}  // namespace

DispersionPoint kinetic_eigenvalues(std::array<int, 2> m, int m_z, double z, double n0,
                                    const ModelParams& p) {
    if (n0 < 0.0) throw InvalidParameterError("kinetic_eigenvalues: n0 must be >= 0");
    DispersionPoint pt;
    pt.m = m;
    pt.m_z = m_z;
    const double msq = m_sq(m);
    pt.lambda1 = -p.D_n * msq;
    pt.lambda2 = -p.D_h * msq - p.beta;
    const double re = -motility_D(z, p) * msq + p.k_V / p.eps + p.gamma * n0;
    const double im = -chez_flux_g(z, 0.0, p) * m_z / p.eps;
    pt.lambda3 = {re, im};
    return pt;
}

DispersionPoint macro_eigenvalues(std::array<int, 2> m, double n0, const ModelParams& p) {
    if (n0 < 0.0) throw InvalidParameterError("macro_eigenvalues: n0 must be >= 0");
    DispersionPoint pt;
    pt.m = m;
    const double msq = m_sq(m);
    pt.lambda1 = -p.D_n * msq;
    pt.lambda2 = -p.D_h * msq - p.beta;
    pt.lambda3 = {-composed_motility_Dtilde(0.0, p) * msq + p.gamma * n0, 0.0};
    return pt;
}

MassOdeValues mass_ode_solution(double A_rho0, double A_h0, double A_n0, double n0,
                                const ModelParams& p, double t) {
    if (t < 0.0) throw InvalidParameterError("mass_ode_solution: t must be >= 0");
    if (n0 < 0.0) throw InvalidParameterError("mass_ode_solution: n0 must be >= 0");
    const double g = p.gamma * n0;
    MassOdeValues v;
    v.A_rho = A_rho0 * std::exp(g * t);
    // particular + homogeneous; g + beta > 0 always, so no singular branch
    const double c = p.alpha * A_rho0 / (g + p.beta);
    v.A_h = (A_h0 - c) * std::exp(-p.beta * t) + c * std::exp(g * t);
    if (g == 0.0)
        v.A_n = A_n0;  // n0 = 0 kills the consumption term entirely
    else
        v.A_n = A_n0 - (p.xi / p.gamma) * A_rho0 * (std::exp(g * t) - 1.0);
    return v;
}

std::array<std::array<double, 3>, 3> dissipativity_matrix(double lambda, double mu, double rho_a,
                                                          const ModelParams& p,
                                                          const HypothesisConstants& hc) {
    // Cross terms chosen so the leading minors reproduce the proof's reduction:
    // minor 2 > 0  <=>  mu/lambda > b rho_a / (4 D_h sqrt(d)),
    // det > 0      <=>  r^2 - (4 beta d / (alpha C_p)^2) r
    //                   + beta b sqrt(d) rho_a / (alpha^2 C_p^2 D_h) < 0.
    const double sqd = std::sqrt(hc.d);
    const double a12 = -0.5 * lambda * std::sqrt(hc.b * rho_a / sqd);
    const double a13 = -0.5 * mu * hc.C_p * p.alpha / sqd;
    return {{{lambda, a12, a13}, {a12, p.D_h * mu, 0.0}, {a13, 0.0, p.beta * mu}}};
}

std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& A) {
    // trigonometric solution of the symmetric 3x3 eigenproblem
    const double p1 = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
    const double tr = A[0][0] + A[1][1] + A[2][2];
    if (p1 == 0.0) {
        std::array<double, 3> e{A[0][0], A[1][1], A[2][2]};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double q = tr / 3.0;
    const double p2 = (A[0][0] - q) * (A[0][0] - q) + (A[1][1] - q) * (A[1][1] - q) +
                      (A[2][2] - q) * (A[2][2] - q) + 2.0 * p1;
    const double pp = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> B{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B[i][j] = (A[i][j] - (i == j ? q : 0.0)) / pp;
    const double detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                        B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                        B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    double r = detB / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * pp * std::cos(phi);
    const double e3 = q + 2.0 * pp * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e2 = tr - e1 - e3;
    std::array<double, 3> e{e1, e2, e3};
    std::sort(e.begin(), e.end());
    return e;
}

DissipativityCertificate dissipativity_certificate(double rho_a, const ModelParams& p,
                                                   const HypothesisConstants& hc) {
    if (rho_a < 0.0) throw InvalidParameterError("dissipativity_certificate: rho_a must be >= 0");
    DissipativityCertificate cert;
    const double ac = p.alpha * p.alpha * hc.C_p * hc.C_p;
    const double qp = 4.0 * p.beta * hc.d / ac;
    const double q0 = p.beta * hc.b * std::sqrt(hc.d) * rho_a / (ac * p.D_h);
    const double disc = qp * qp - 4.0 * q0;
    if (disc <= 0.0) return cert;  // quadratic has no admissible root
    const double root = std::sqrt(disc);
    const double r_minor = hc.b * rho_a / (4.0 * p.D_h * std::sqrt(hc.d));
    const double r_lo = std::max(0.5 * (qp - root), r_minor);
    const double r_hi = 0.5 * (qp + root);
    if (!(r_lo < r_hi)) return cert;
    cert.certified = true;
    cert.r_lo = r_lo;
    cert.r_hi = r_hi;
    cert.lambda = 1.0;
    cert.mu = 0.5 * (r_lo + r_hi);
    const auto A = dissipativity_matrix(cert.lambda, cert.mu, rho_a, p, hc);
    cert.alpha_min = sym3_eigenvalues(A)[0];
    return cert;
}

double lifespan_H(double y, int s) {
    if (y < 0.0) throw InvalidParameterError("lifespan_H: y must be >= 0");
    if (s < 1) throw InvalidParameterError("lifespan_H: s must be >= 1");
    return y / std::pow(1.0 + std::pow(y, 0.5 * s), 2.0 / s);
}

double lifespan_H_inverse(double target, int s) {
    if (target < 0.0 || target >= 1.0)
        throw InvalidParameterError("lifespan_H_inverse: target must lie in [0, 1)");
    if (target == 0.0) return 0.0;
    double hi = 1.0;
    while (lifespan_H(hi, s) < target) {
        hi *= 2.0;
        if (hi > 1e300) throw InvalidParameterError("lifespan_H_inverse: target too close to 1");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lifespan_H(mid, s) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double lifespan_lower_bound(double E_in, double eps, int s, double C) {
    if (!(E_in > 0.0)) throw InvalidParameterError("lifespan_lower_bound: E_in must be positive");
    if (!(eps > 0.0)) throw InvalidParameterError("lifespan_lower_bound: eps must be positive");
    if (!(C > 0.0)) throw InvalidParameterError("lifespan_lower_bound: C must be positive");
    if (s < 1) throw InvalidParameterError("lifespan_lower_bound: s must be >= 1");
    const double num = std::log(std::pow(1.0 + std::pow(E_in, 0.5 * s), 2.0 / s) / E_in);
    return num / (C * (1.0 + 1.0 / eps));
}

}  // namespace stripelab
