#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "stripelab/config.hpp"

namespace stripelab {

/// Flat machine-readable run summary; serialized as summary.json.
struct RunSummary {
    std::string model;
    long steps = 0;
    double dt = 0.0;
    double t_end = 0.0;
    std::map<std::string, double> metrics;  // drift, minima, fitted rates, ...
    std::string json() const;
};

/// Builders for the shipped initial-condition library (seed only used by the
/// random kind).
KineticState build_kinetic_initial(const InitialConfig& init, const PeriodicGrid& grid,
                                   const ModelParams& params, std::uint64_t seed);
MacroState build_macro_initial(const InitialConfig& init, const PeriodicGrid& grid,
                               const ModelParams& params, std::uint64_t seed);

/// Runs one configured experiment into out_dir: diagnostics.csv, optional
/// snapshot files, summary.json. Deterministic given (config, seed).
RunSummary run_single_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 std::uint64_t seed);

/// Runs a sweep (config.sweep must be set): one subdirectory per value plus
/// sweep_summary.csv. Runs execute in a pool of `threads` workers.
void run_sweep_experiment(const ExperimentConfig& config, const std::string& out_dir, int threads,
                          std::uint64_t seed);

/// Dispatches on the presence of a sweep block. out_dir_override empty keeps
/// config.output.dir.
void run_experiment(const ExperimentConfig& config, const std::string& out_dir_override,
                    int threads, std::uint64_t seed);

}  // namespace stripelab
