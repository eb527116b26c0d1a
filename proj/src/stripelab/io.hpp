#pragma once

#include <string>

#include "stripelab/solver.hpp"

namespace stripelab {

/// Snapshot format: one header line
///   # stripe-lab snapshot v1; dim_x=...; n_x=...; n_z=...; t=...
/// followed by whitespace-separated decimal values (17 significant digits) in
/// storage order: rho block, then h, then n.
void write_snapshot(const std::string& path, const KineticState& state);
void write_snapshot(const std::string& path, const MacroState& state);

/// Readers verify the header against the expected grid; the kinetic/macro
/// flavor is fixed by the caller.
KineticState read_kinetic_snapshot(const std::string& path, const PeriodicGrid& grid);
MacroState read_macro_snapshot(const std::string& path, const PeriodicGrid& grid);

}  // namespace stripelab
