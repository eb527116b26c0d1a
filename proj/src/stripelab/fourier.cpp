#include "stripelab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace stripelab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int signed_freq(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

// Sum over multi-indices |alpha| <= s of prod_a w[a]^{alpha_a}, where w[a] are
// per-axis squared wavenumbers. This is the H^s derivative multiplier.
double hs_multiplier(const std::vector<double>& w, int s) {
    // S(d) built by convolving one axis at a time, truncated at total order s.
    std::vector<double> acc(static_cast<std::size_t>(s) + 1, 0.0);
    acc[0] = 1.0;
    for (double a : w) {
        std::vector<double> next(static_cast<std::size_t>(s) + 1, 0.0);
        for (int tot = 0; tot <= s; ++tot) {
            if (acc[tot] == 0.0) continue;
            double p = 1.0;
            for (int j = 0; tot + j <= s; ++j) {
                next[tot + j] += acc[tot] * p;
                p *= a;
            }
        }
        acc = std::move(next);
    }
    double r = 0.0;
    for (double v : acc) r += v;
    return r;
}

}  // namespace

struct SpectralWorkspace::Impl {
    int n_axes_x = 1;                 // spatial axes
    std::vector<int> dims_scalar;     // {n_x} or {n_x, n_x}
    std::vector<int> dims_kinetic;    // spatial dims + n_z
    std::size_t n_scalar = 0, n_kinetic = 0;
    double dv_scalar = 0.0, dv_kinetic = 0.0;
    std::vector<double> kx;           // wavenumber step per spatial axis
    double kz = 0.0;

    fftw_complex* buf_a = nullptr;
    fftw_complex* buf_b = nullptr;
    fftw_plan fwd_scalar{}, bwd_scalar{}, fwd_kinetic{}, bwd_kinetic{};

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_scalar);
        fftw_destroy_plan(bwd_scalar);
        fftw_destroy_plan(fwd_kinetic);
        fftw_destroy_plan(bwd_kinetic);
        fftw_free(buf_a);
        fftw_free(buf_b);
    }
};

SpectralWorkspace::SpectralWorkspace(const PeriodicGrid& grid) : grid_(grid), impl_(new Impl) {
    grid.validate();
    impl_->n_axes_x = grid.dim_x;
    impl_->dims_scalar.assign(static_cast<std::size_t>(grid.dim_x), grid.n_x);
    impl_->dims_kinetic = impl_->dims_scalar;
    impl_->dims_kinetic.push_back(grid.n_z);
    impl_->n_scalar = static_cast<std::size_t>(grid.x_nodes());
    impl_->n_kinetic = impl_->n_scalar * grid.n_z;
    impl_->dv_scalar = grid.x_cell_volume();
    impl_->dv_kinetic = grid.x_cell_volume() * grid.dz();
    impl_->kx.assign(static_cast<std::size_t>(grid.dim_x), kTwoPi / grid.length_x);
    impl_->kz = kTwoPi / grid.Z_w;

    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->buf_a = fftw_alloc_complex(impl_->n_kinetic);
    impl_->buf_b = fftw_alloc_complex(impl_->n_kinetic);
    impl_->fwd_scalar = fftw_plan_dft(grid.dim_x, impl_->dims_scalar.data(), impl_->buf_a,
                                      impl_->buf_a, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd_scalar = fftw_plan_dft(grid.dim_x, impl_->dims_scalar.data(), impl_->buf_b,
                                      impl_->buf_b, FFTW_BACKWARD, FFTW_ESTIMATE);
    impl_->fwd_kinetic = fftw_plan_dft(grid.dim_x + 1, impl_->dims_kinetic.data(), impl_->buf_a,
                                       impl_->buf_a, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd_kinetic = fftw_plan_dft(grid.dim_x + 1, impl_->dims_kinetic.data(), impl_->buf_b,
                                       impl_->buf_b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() { delete impl_; }

namespace {

void load_real(fftw_complex* dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i][0] = src[i];
        dst[i][1] = 0.0;
    }
}

// Iterates mode indices of a row-major transform, exposing the per-axis
// squared wavenumbers. cb(flat_index, axis_sq_wavenumbers).
template <class Cb>
void for_each_mode(const std::vector<int>& dims, const std::vector<double>& kstep, Cb&& cb) {
    const int rank = static_cast<int>(dims.size());
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    std::vector<double> wsq(static_cast<std::size_t>(rank), 0.0);
    std::size_t flat = 0;
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (int d : dims) t *= static_cast<std::size_t>(d);
        return t;
    }();
    for (; flat < total; ++flat) {
        for (int a = 0; a < rank; ++a) {
            const double k = kstep[static_cast<std::size_t>(a)] *
                             signed_freq(idx[static_cast<std::size_t>(a)], dims[static_cast<std::size_t>(a)]);
            wsq[static_cast<std::size_t>(a)] = k * k;
        }
        cb(flat, wsq);
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < dims[static_cast<std::size_t>(a)]) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
}

// Multi-index enumeration |alpha| <= s over `rank` axes.
void enumerate_multi_indices(int rank, int s, std::vector<std::vector<int>>& out) {
    std::vector<int> alpha(static_cast<std::size_t>(rank), 0);
    while (true) {
        int tot = 0;
        for (int v : alpha) tot += v;
        if (tot <= s) out.push_back(alpha);
        int a = rank - 1;
        while (a >= 0) {
            if (++alpha[static_cast<std::size_t>(a)] <= s) break;
            alpha[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
}

}  // namespace

double SpectralWorkspace::sobolev_norm_sq(const ScalarField& f, int s) const {
    require_same_grid(f.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_scalar);
    double acc = 0.0;
    for_each_mode(impl_->dims_scalar, impl_->kx, [&](std::size_t i, const std::vector<double>& w) {
        const double p2 = impl_->buf_a[i][0] * impl_->buf_a[i][0] +
                          impl_->buf_a[i][1] * impl_->buf_a[i][1];
        acc += p2 * hs_multiplier(w, s);
    });
    return acc * impl_->dv_scalar / static_cast<double>(impl_->n_scalar);
}

double SpectralWorkspace::grad_sobolev_norm_sq(const ScalarField& f, int s) const {
    require_same_grid(f.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_scalar);
    double acc = 0.0;
    for_each_mode(impl_->dims_scalar, impl_->kx, [&](std::size_t i, const std::vector<double>& w) {
        const double p2 = impl_->buf_a[i][0] * impl_->buf_a[i][0] +
                          impl_->buf_a[i][1] * impl_->buf_a[i][1];
        double grad = 0.0;
        for (double v : w) grad += v;
        acc += p2 * grad * hs_multiplier(w, s);
    });
    return acc * impl_->dv_scalar / static_cast<double>(impl_->n_scalar);
}

double SpectralWorkspace::sobolev_norm_sq(const KineticField& f, int s) const {
    require_same_grid(f.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_kinetic);
    std::vector<double> kall = impl_->kx;
    kall.push_back(impl_->kz);
    double acc = 0.0;
    for_each_mode(impl_->dims_kinetic, kall, [&](std::size_t i, const std::vector<double>& w) {
        const double p2 = impl_->buf_a[i][0] * impl_->buf_a[i][0] +
                          impl_->buf_a[i][1] * impl_->buf_a[i][1];
        acc += p2 * hs_multiplier(w, s);
    });
    return acc * impl_->dv_kinetic / static_cast<double>(impl_->n_kinetic);
}

double SpectralWorkspace::grad_sobolev_norm_sq(const KineticField& f, int s) const {
    require_same_grid(f.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_kinetic);
    std::vector<double> kall = impl_->kx;
    kall.push_back(impl_->kz);
    const std::size_t nx_axes = impl_->kx.size();
    double acc = 0.0;
    for_each_mode(impl_->dims_kinetic, kall, [&](std::size_t i, const std::vector<double>& w) {
        const double p2 = impl_->buf_a[i][0] * impl_->buf_a[i][0] +
                          impl_->buf_a[i][1] * impl_->buf_a[i][1];
        double grad = 0.0;
        for (std::size_t a = 0; a < nx_axes; ++a) grad += w[a];  // x-gradient only
        acc += p2 * grad * hs_multiplier(w, s);
    });
    return acc * impl_->dv_kinetic / static_cast<double>(impl_->n_kinetic);
}

// Shared physical-space path: for each derivative multi-index |alpha| <= s
// (times each gradient axis when n_grad_axes > 0) form the derivative field
// spectrally, transform back, and accumulate the weighted square integral.
// The forward transform of the input is expected in buf_a.
template <class WeightAt>
static double weighted_terms(SpectralWorkspace::Impl* impl, const std::vector<int>& dims,
                             const std::vector<double>& ksteps, fftw_plan bwd, std::size_t n,
                             double dv, int s, int n_grad_axes, const WeightAt& weight_at) {
    const int rank = static_cast<int>(dims.size());
    std::vector<std::vector<int>> alphas;
    enumerate_multi_indices(rank, s, alphas);
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    const int grad_reps = (n_grad_axes == 0) ? 1 : n_grad_axes;
    for (const auto& alpha : alphas) {
        for (int gaxis = 0; gaxis < grad_reps; ++gaxis) {
            std::vector<int> ord = alpha;
            if (n_grad_axes > 0) ++ord[static_cast<std::size_t>(gaxis)];
            int tot = 0;
            for (int v : ord) tot += v;
            const int phase = tot % 4;  // multiplier (i k)^ord carries i^tot
            std::vector<int> idx(static_cast<std::size_t>(rank), 0);
            for (std::size_t flat = 0; flat < n; ++flat) {
                double m = 1.0;
                for (int a = 0; a < rank; ++a) {
                    const double k =
                        ksteps[static_cast<std::size_t>(a)] *
                        signed_freq(idx[static_cast<std::size_t>(a)], dims[static_cast<std::size_t>(a)]);
                    for (int r = 0; r < ord[static_cast<std::size_t>(a)]; ++r) m *= k;
                }
                const double re = impl->buf_a[flat][0] * m;
                const double im = impl->buf_a[flat][1] * m;
                switch (phase) {
                    case 0:
                        impl->buf_b[flat][0] = re;
                        impl->buf_b[flat][1] = im;
                        break;
                    case 1:
                        impl->buf_b[flat][0] = -im;
                        impl->buf_b[flat][1] = re;
                        break;
                    case 2:
                        impl->buf_b[flat][0] = -re;
                        impl->buf_b[flat][1] = -im;
                        break;
                    default:
                        impl->buf_b[flat][0] = im;
                        impl->buf_b[flat][1] = -re;
                        break;
                }
                for (int a = rank - 1; a >= 0; --a) {
                    if (++idx[static_cast<std::size_t>(a)] < dims[static_cast<std::size_t>(a)]) break;
                    idx[static_cast<std::size_t>(a)] = 0;
                }
            }
            fftw_execute(bwd);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = impl->buf_b[i][0] * inv_n;
                acc += weight_at(i) * g * g;
            }
            total += acc * dv;
        }
    }
    return total;
}

double SpectralWorkspace::sobolev_norm_sq(const KineticField& f, int s,
                                          const std::vector<double>& weight_z) const {
    require_same_grid(f.grid(), grid_);
    if (static_cast<int>(weight_z.size()) != grid_.n_z)
        throw InvalidParameterError("weight_z size must match n_z");
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_kinetic);
    std::vector<double> kall = impl_->kx;
    kall.push_back(impl_->kz);
    const int nz = grid_.n_z;
    return weighted_terms(impl_, impl_->dims_kinetic, kall, impl_->bwd_kinetic, impl_->n_kinetic,
                          impl_->dv_kinetic, s, 0,
                          [&](std::size_t i) { return weight_z[i % static_cast<std::size_t>(nz)]; });
}

double SpectralWorkspace::grad_sobolev_norm_sq(const KineticField& f, int s,
                                               const std::vector<double>& weight_z) const {
    require_same_grid(f.grid(), grid_);
    if (static_cast<int>(weight_z.size()) != grid_.n_z)
        throw InvalidParameterError("weight_z size must match n_z");
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_kinetic);
    std::vector<double> kall = impl_->kx;
    kall.push_back(impl_->kz);
    const int nz = grid_.n_z;
    return weighted_terms(impl_, impl_->dims_kinetic, kall, impl_->bwd_kinetic, impl_->n_kinetic,
                          impl_->dv_kinetic, s, grid_.dim_x,
                          [&](std::size_t i) { return weight_z[i % static_cast<std::size_t>(nz)]; });
}

double SpectralWorkspace::grad_sobolev_norm_sq(const ScalarField& f, int s,
                                               const ScalarField& weight_x) const {
    require_same_grid(f.grid(), grid_);
    require_same_grid(weight_x.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_scalar);
    return weighted_terms(impl_, impl_->dims_scalar, impl_->kx, impl_->bwd_scalar, impl_->n_scalar,
                          impl_->dv_scalar, s, grid_.dim_x,
                          [&](std::size_t i) { return weight_x[static_cast<int>(i)]; });
}

std::vector<double> SpectralWorkspace::mode_amplitudes(const ScalarField& f, int m_max) const {
    require_same_grid(f.grid(), grid_);
    load_real(impl_->buf_a, f.values());
    fftw_execute(impl_->fwd_scalar);
    const int top = std::min(m_max, grid_.n_x / 2);
    std::vector<double> amps(static_cast<std::size_t>(top) + 1, 0.0);
    const double inv_n = 1.0 / static_cast<double>(impl_->n_scalar);
    for (int m = 0; m <= top; ++m) {
        // index (m, 0, ...) in row-major layout
        const std::size_t flat = (grid_.dim_x == 1) ? static_cast<std::size_t>(m)
                                                    : static_cast<std::size_t>(m) * grid_.n_x;
        amps[static_cast<std::size_t>(m)] =
            std::hypot(impl_->buf_a[flat][0], impl_->buf_a[flat][1]) * inv_n;
    }
    return amps;
}

}  // namespace stripelab
