#pragma once

#include <vector>

#include "stripelab/errors.hpp"
#include "stripelab/model.hpp"

namespace stripelab {

/// Uniform periodic grid: 1 or 2 spatial axes of n_x points each over
/// [-length_x/2, length_x/2), plus a z axis of n_z midpoint nodes over [0, Z_w).
struct PeriodicGrid {
    int dim_x = 1;
    int n_x = 64;
    double length_x = 6.283185307179586476925287;
    int n_z = 32;
    double Z_w = 1.0;

    double dx() const { return length_x / n_x; }
    double dz() const { return Z_w / n_z; }
    int x_nodes() const { return dim_x == 1 ? n_x : n_x * n_x; }
    double x_cell_volume() const { return dim_x == 1 ? dx() : dx() * dx(); }
    double x_coord(int i) const { return i * dx() - 0.5 * length_x; }
    double z_coord(int j) const { return (j + 0.5) * dz(); }

    void validate() const;
    bool operator==(const PeriodicGrid&) const = default;
};

class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const PeriodicGrid& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.x_nodes()), fill) {}

    const PeriodicGrid& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * grid_.n_x + j]; }
    double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.n_x + j]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

  private:
    PeriodicGrid grid_;
    std::vector<double> v_;
};

/// rho(x, z); z varies fastest within each x-node block.
class KineticField {
  public:
    KineticField() = default;
    explicit KineticField(const PeriodicGrid& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.x_nodes()) * g.n_z, fill) {}

    const PeriodicGrid& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double at(int xnode, int j) const { return v_[static_cast<std::size_t>(xnode) * grid_.n_z + j]; }
    double& at(int xnode, int j) { return v_[static_cast<std::size_t>(xnode) * grid_.n_z + j]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

  private:
    PeriodicGrid grid_;
    std::vector<double> v_;
};

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b);

/// Second-order centered periodic Laplacian in x.
ScalarField laplacian(const ScalarField& f);
KineticField laplacian(const KineticField& f);

/// Midpoint-rule z integral: dz * sum_z rho.
ScalarField integrate_z(const KineticField& rho);

/// Scaled conservative upwind divergence (1/eps) d/dz (g(z, h) rho) with
/// periodic wrap; face velocities are arithmetic means of the adjacent node
/// values of g. z-column sums of the result vanish (telescoping).
KineticField z_flux_divergence(const KineticField& rho, const ScalarField& h,
                               const ModelParams& params, double eps);

/// Largest |g| over z faces for the CFL bound, for AHL level h.
double max_face_speed(const PeriodicGrid& g, double L_of_h, double k_V);

double field_min(const ScalarField& f);
double field_min(const KineticField& f);
bool field_finite(const ScalarField& f);
bool field_finite(const KineticField& f);

/// Integral over the spatial domain (and z, for kinetic fields).
double mass(const ScalarField& f);
double mass(const KineticField& f);

}  // namespace stripelab
