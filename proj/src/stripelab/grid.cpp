#include "stripelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stripelab {

void PeriodicGrid::validate() const {
    if (dim_x != 1 && dim_x != 2) throw InvalidParameterError("grid: dim_x must be 1 or 2");
    if (n_x < 8 || n_x % 2 != 0) throw InvalidParameterError("grid: n_x must be even and >= 8");
    if (n_z < 8 || n_z % 2 != 0) throw InvalidParameterError("grid: n_z must be even and >= 8");
    if (!(length_x > 0.0)) throw InvalidParameterError("grid: length_x must be positive");
    if (!(Z_w > 0.0)) throw InvalidParameterError("grid: Z_w must be positive");
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
    if (!(a == b)) throw GridMismatchError("fields live on different grids");
}

ScalarField laplacian(const ScalarField& f) {
    const PeriodicGrid& g = f.grid();
    ScalarField out(g);
    const double inv_dx2 = 1.0 / (g.dx() * g.dx());
    const int n = g.n_x;
    if (g.dim_x == 1) {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            out[i] = (f[ip] + f[im] - 2.0 * f[i]) * inv_dx2;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            for (int j = 0; j < n; ++j) {
                const int jp = (j + 1 == n) ? 0 : j + 1;
                const int jm = (j == 0) ? n - 1 : j - 1;
                out.at(i, j) = (f.at(ip, j) + f.at(im, j) - 2.0 * f.at(i, j)) * inv_dx2 +
                               (f.at(i, jp) + f.at(i, jm) - 2.0 * f.at(i, j)) * inv_dx2;
            }
        }
    }
    return out;
}

KineticField laplacian(const KineticField& f) {
    const PeriodicGrid& g = f.grid();
    KineticField out(g);
    const double inv_dx2 = 1.0 / (g.dx() * g.dx());
    const int n = g.n_x, nz = g.n_z;
    if (g.dim_x == 1) {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            for (int k = 0; k < nz; ++k)
                out.at(i, k) = (f.at(ip, k) + f.at(im, k) - 2.0 * f.at(i, k)) * inv_dx2;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            for (int j = 0; j < n; ++j) {
                const int jp = (j + 1 == n) ? 0 : j + 1;
                const int jm = (j == 0) ? n - 1 : j - 1;
                const int c = i * n + j, xp = ip * n + j, xm = im * n + j, yp = i * n + jp,
                          ym = i * n + jm;
                for (int k = 0; k < nz; ++k)
                    out.at(c, k) = (f.at(xp, k) + f.at(xm, k) - 2.0 * f.at(c, k)) * inv_dx2 +
                                   (f.at(yp, k) + f.at(ym, k) - 2.0 * f.at(c, k)) * inv_dx2;
            }
        }
    }
    return out;
}

ScalarField integrate_z(const KineticField& rho) {
    const PeriodicGrid& g = rho.grid();
    ScalarField out(g);
    const double dz = g.dz();
    for (int x = 0; x < g.x_nodes(); ++x) {
        double acc = 0.0;
        for (int k = 0; k < g.n_z; ++k) acc += rho.at(x, k);
        out[x] = acc * dz;
    }
    return out;
}

KineticField z_flux_divergence(const KineticField& rho, const ScalarField& h,
                               const ModelParams& params, double eps) {
    require_same_grid(rho.grid(), h.grid());
    if (!(eps > 0.0)) throw InvalidParameterError("z_flux_divergence: eps must be positive");
    const PeriodicGrid& g = rho.grid();
    const int nz = g.n_z;
    const double dz = g.dz();
    const double scale = 1.0 / (eps * dz);
    KineticField out(g);
    const SmoothedSwitch sw = chez_switch(params);
    std::vector<double> flux(static_cast<std::size_t>(nz) + 1);
    for (int x = 0; x < g.x_nodes(); ++x) {
        const double L = sw.value(h[x]);
        // face k sits at z = k*dz between nodes k-1 and k; the mean of the two
        // adjacent node values of g is exact there except at the wrap face,
        // where g is not periodic and the mean gives k_V (L - Z_w/2).
        for (int k = 0; k <= nz; ++k) {
            const int jm = (k == 0) ? nz - 1 : k - 1;
            const int jp = (k == nz) ? 0 : k;
            const double gz =
                params.k_V * (L - 0.5 * (g.z_coord(jm) + g.z_coord(jp)));
            const double up = (gz > 0.0) ? rho.at(x, jm) : rho.at(x, jp);
            flux[k] = gz * up;
        }
        flux[nz] = flux[0];  // shared wrap face
        for (int k = 0; k < nz; ++k) out.at(x, k) = (flux[k + 1] - flux[k]) * scale;
    }
    return out;
}

double max_face_speed(const PeriodicGrid& g, double L_of_h, double k_V) {
    double m = std::abs(k_V * (L_of_h - 0.5 * g.Z_w));  // wrap face
    for (int k = 1; k < g.n_z; ++k)
        m = std::max(m, std::abs(k_V * (L_of_h - k * g.dz())));
    return m;
}

namespace {
template <class F>
double min_of(const F& f) {
    double m = f[0];
    for (int i = 1; i < f.size(); ++i) m = std::min(m, f[i]);
    return m;
}
template <class F>
bool finite_of(const F& f) {
    for (int i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i])) return false;
    return true;
}
}  // namespace

double field_min(const ScalarField& f) { return min_of(f); }
double field_min(const KineticField& f) { return min_of(f); }
bool field_finite(const ScalarField& f) { return finite_of(f); }
bool field_finite(const KineticField& f) { return finite_of(f); }

double mass(const ScalarField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += f[i];
    return acc * f.grid().x_cell_volume();
}

double mass(const KineticField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += f[i];
    return acc * f.grid().x_cell_volume() * f.grid().dz();
}

}  // namespace stripelab
