#pragma once

#include <string>
#include <vector>

#include "stripelab/diagnostics.hpp"
#include "stripelab/model.hpp"
#include "stripelab/solver.hpp"

namespace stripelab {

struct GridConfig {
    int dim_x = 1;
    int n_x = 64;
    double length_x = 6.283185307179586476925287;
    int n_z = 32;
    bool operator==(const GridConfig&) const = default;
};

enum class InitialKind { Constant, GaussianBump, FourierMode, Random, Concentrated };

struct InitialConfig {
    InitialKind kind = InitialKind::GaussianBump;
    double rho0 = 1.0;
    double h0 = 0.0;
    double n0 = 1.0;
    double amplitude = 0.1;      // bump height / mode amplitude / random spread
    int mode = 1;                // fourier-mode wavenumber
    FieldSelector field = FieldSelector::H;  // fourier-mode target field
    double sigma_x = 0.5;
    double sigma_z = 0.1;
    double x_center = 0.0;
    double z_center = -1.0;      // negative selects L_ell(h0)
    bool operator==(const InitialConfig&) const = default;
};

struct DiagnosticsConfig {
    bool energies = true;
    int mode_max = 4;
    double fit_window_start = 0.1;  // fraction of the run excluded from rate fits
    bool operator==(const DiagnosticsConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    bool write_snapshots = true;
    bool operator==(const OutputConfig&) const = default;
};

struct SweepConfig {
    std::string parameter;  // empty: no sweep; otherwise a [params] key
    std::vector<double> values;
    bool operator==(const SweepConfig&) const = default;
};

enum class ModelKind { KEecp, AdEecp, Science2011 };

struct ExperimentConfig {
    ModelKind model = ModelKind::AdEecp;
    ModelParams params;
    GridConfig grid;
    StepControl step;
    InitialConfig initial;
    DiagnosticsConfig diagnostics;
    OutputConfig output;
    SweepConfig sweep;

    PeriodicGrid make_grid() const;
    /// Semantic validation on top of parsing; throws ConfigError.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Strict parse of the sectioned key = value format. Unknown sections or keys
/// are errors (with a nearest-match suggestion); messages carry line and
/// column. The parsed config is validated before being returned.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical rendering; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

/// Assigns a [params] key by name (used by sweeps). Throws ConfigError for
/// names that are not sweepable numeric parameters.
void set_param_by_name(ModelParams& params, const std::string& name, double value);

const char* model_kind_name(ModelKind kind);

}  // namespace stripelab
