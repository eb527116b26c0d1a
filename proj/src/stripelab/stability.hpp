#pragma once

#include <array>
#include <complex>

#include "stripelab/model.hpp"

namespace stripelab {

/// Eigenvalues of the linearization around (0, 0, n0) at one spatial frequency.
struct DispersionPoint {
    std::array<int, 2> m{0, 0};  // integer wavevector components (second unused in 1D)
    int m_z = 0;                 // z frequency (kinetic only)
    double lambda1 = 0.0;        // -D_n |m|^2
    double lambda2 = 0.0;        // -D_h |m|^2 - beta
    std::complex<double> lambda3{0.0, 0.0};
};

/// Kinetic linearization: lambda3 = -D(z)|m|^2 + k_V/eps + gamma n0 - i g(z,0) m_z / eps.
/// z enters as a parameter of the characteristic matrix.
DispersionPoint kinetic_eigenvalues(std::array<int, 2> m, int m_z, double z, double n0,
                                    const ModelParams& p);

/// Macroscopic linearization: lambda3 = -Dtilde(0)|m|^2 + gamma n0.
DispersionPoint macro_eigenvalues(std::array<int, 2> m, double n0, const ModelParams& p);

struct MassOdeValues {
    double A_rho = 0.0;
    double A_h = 0.0;
    double A_n = 0.0;
};

/// Exact solution of the total-mass ODE system around (0,0,n0):
///   A_rho' = gamma n0 A_rho,  A_h' = alpha A_rho - beta A_h,  A_n' = -xi n0 A_rho.
MassOdeValues mass_ode_solution(double A_rho0, double A_h0, double A_n0, double n0,
                                const ModelParams& p, double t);

struct DissipativityCertificate {
    bool certified = false;
    double lambda = 1.0;
    double mu = 0.0;          // lambda * r at the midpoint of the admissible ratio interval
    double alpha_min = 0.0;   // least eigenvalue of the certificate matrix (alpha_1..3 bound)
    double r_lo = 0.0, r_hi = 0.0;  // admissible interval for r = mu/lambda
};

/// The symmetric certificate matrix A(lambda, mu) whose positive definiteness
/// certifies energy dissipation near (rho_a, h_a, 0).
std::array<std::array<double, 3>, 3> dissipativity_matrix(double lambda, double mu, double rho_a,
                                                          const ModelParams& p,
                                                          const HypothesisConstants& hc);

/// Searches the ratio r = mu/lambda over the analytic admissible interval
/// (minor positivity + determinant quadratic). Certifiable iff rho_a < Lambda_b.
DissipativityCertificate dissipativity_certificate(double rho_a, const ModelParams& p,
                                                   const HypothesisConstants& hc);

/// Eigenvalues of a symmetric 3x3 matrix, ascending.
std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& A);

/// H(y) = y / (1 + y^{s/2})^{2/s}; strictly increasing from 0 toward 1.
double lifespan_H(double y, int s);

/// Inverse of H by bisection. Requires target in [0, 1).
double lifespan_H_inverse(double target, int s);

/// T0 = ln([1 + E_in^{s/2}]^{2/s} / E_in) / (C (1 + 1/eps)).
double lifespan_lower_bound(double E_in, double eps, int s, double C);

}  // namespace stripelab
