#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stripelab/fourier.hpp"
#include "stripelab/grid.hpp"
#include "stripelab/model.hpp"

namespace stripelab {

struct KineticState;
struct MacroState;

/// One time-stamped row of run diagnostics. Energy slots not applicable to the
/// run kind stay NaN and are omitted from the CSV.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_rho = 0.0;
    double mass_n = 0.0;
    double combined_invariant = 0.0;  // mass_rho + factor * mass_n
    double min_rho = 0.0;
    double min_h = 0.0;
    double min_n = 0.0;

    static constexpr double unset = std::numeric_limits<double>::quiet_NaN();
    double E_L = unset, D_L = unset;                          // kinetic energies
    double E_l = unset, D_l = unset, EE_l = unset, DD_l = unset;  // macroscopic energies
    double E_g = unset, D_g = unset;                          // perturbation energies
    double m2_z = unset;  // mean second z-moment about L_ell(h)

    std::vector<double> mode_rho, mode_h, mode_n;  // |m| = 0..mode_max amplitudes
};

enum class RunKind { Kinetic, MacroAd, MacroScience };
enum class FieldSelector { Rho, H, N };

struct DiagnosticsOptions {
    bool energies = true;
    int mode_max = 4;
    /// When set, records also carry E_g/D_g about the steady state
    /// (rho_a, h_a = alpha rho_a / beta, 0).
    std::optional<double> perturbation_rho_a;
};

class DiagnosticsEngine {
  public:
    DiagnosticsEngine(const PeriodicGrid& grid, const ModelParams& params,
                      const HypothesisConstants& constants, RunKind kind,
                      DiagnosticsOptions options = {});

    DiagnosticsRecord record(const KineticState& state);
    DiagnosticsRecord record(const MacroState& state);

    /// E_L, D_L of the kinetic a priori estimate. Requires s >= 3.
    std::pair<double, double> energy_kinetic(const KineticState& state, int s);

    /// E_l, D_l, EE_l (the Dtilde energy) and DD_l. Requires s >= 4.
    std::array<double, 4> energy_macro(const MacroState& state, int s);

    /// E_g, D_g about (rho_a, h_a, 0) with uniform coefficients.
    std::pair<double, double> energy_perturbation(const MacroState& state, int s, double rho_a);

    /// Mass-weighted second z-moment about L_ell(h), periodic distance.
    double second_z_moment(const KineticState& state) const;

    double invariant_factor() const { return invariant_factor_; }
    const SpectralWorkspace& workspace() const { return workspace_; }

  private:
    PeriodicGrid grid_;
    ModelParams params_;
    HypothesisConstants constants_;
    RunKind kind_;
    DiagnosticsOptions options_;
    double invariant_factor_;
    SpectralWorkspace workspace_;
    std::vector<double> D_at_z_;
};

struct GronwallAudit {
    double C = 0.0;      // smallest constant satisfying the inequality at interior records
    int violations = 0;  // interior records where no finite constant exists
};

/// Audits d/dt E + D <= C (1 + 1/eps)(1 + E^{s/2}) E along the records, with
/// dE/dt from centered differences. Uses E_L/D_L when present, E_l/D_l
/// otherwise, and the longest uniformly spaced prefix (a truncated final step
/// is dropped). Needs >= 10 uniformly spaced records.
GronwallAudit gronwall_audit(const std::vector<DiagnosticsRecord>& records, double eps, int s);

struct RateFit {
    double rate = 0.0;      // least-squares slope of log(value) vs t
    double residual = 0.0;  // RMS residual of the fit in log space
};

/// Fits an exponential rate over [t0 + window_start_frac*(t1-t0), t1].
/// Throws InvalidParameterError on non-positive values inside the window.
RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                             double window_start_frac = 0.1);

/// Exponential rate of one tracked Fourier mode of a recorded field.
RateFit mode_growth_rate(const std::vector<DiagnosticsRecord>& records, FieldSelector field,
                         int mode, double window_start_frac = 0.1);

/// CSV with one header row and 17-significant-digit values; columns are the
/// record fields applicable to the run kind.
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

}  // namespace stripelab
