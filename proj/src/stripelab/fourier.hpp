#pragma once

#include <complex>
#include <vector>

#include "stripelab/grid.hpp"

namespace stripelab {

/// Fourier-side diagnostics for one grid: discrete H^s norms with derivatives
/// applied as spectral multipliers, optionally weighted pointwise in physical
/// space, plus per-mode amplitudes. Holds FFT plans and scratch buffers, so a
/// workspace is not safe for concurrent use; make one per thread.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(const PeriodicGrid& grid);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const PeriodicGrid& grid() const { return grid_; }

    /// ||f||^2_{H^s_x} resp. ||f||^2_{H^s_{x,z}} (sum over multi-indices |k| <= s).
    double sobolev_norm_sq(const ScalarField& f, int s) const;
    double sobolev_norm_sq(const KineticField& f, int s) const;

    /// ||grad_x f||^2_{H^s...}.
    double grad_sobolev_norm_sq(const ScalarField& f, int s) const;
    double grad_sobolev_norm_sq(const KineticField& f, int s) const;

    /// Variants weighted pointwise by w(z) (kinetic) or w(x) (scalar).
    double sobolev_norm_sq(const KineticField& f, int s, const std::vector<double>& weight_z) const;
    double grad_sobolev_norm_sq(const KineticField& f, int s,
                                const std::vector<double>& weight_z) const;
    double grad_sobolev_norm_sq(const ScalarField& f, int s, const ScalarField& weight_x) const;

    /// |fhat_(m,0,...)| / N for m = 0..m_max along the first axis.
    std::vector<double> mode_amplitudes(const ScalarField& f, int m_max) const;

    struct Impl;

  private:
    PeriodicGrid grid_;
    Impl* impl_;
};

}  // namespace stripelab
