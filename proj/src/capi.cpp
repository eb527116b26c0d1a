#include "stripelab/stripelab.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "stripelab/config.hpp"
#include "stripelab/errors.hpp"
#include "stripelab/experiment.hpp"
#include "stripelab/stability.hpp"

using namespace stripelab;

struct sl_config {
    ExperimentConfig config;
};

struct sl_result {
    RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

sl_status fail(sl_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <class Fn>
sl_status guarded(Fn&& fn) {
    try {
        fn();
        return SL_OK;
    } catch (const ConfigError& e) {
        return fail(SL_ERR_CONFIG, e.what());
    } catch (const DivergenceError& e) {
        return fail(SL_ERR_DIVERGED, e.what());
    } catch (const CflError& e) {
        return fail(SL_ERR_CONFIG, e.what());
    } catch (const IoError& e) {
        return fail(SL_ERR_IO, e.what());
    } catch (const InvalidParameterError& e) {
        return fail(SL_ERR_INVALID, e.what());
    } catch (const Error& e) {
        return fail(SL_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(SL_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* sl_status_name(sl_status status) {
    switch (status) {
        case SL_OK: return "ok";
        case SL_ERR_CONFIG: return "config-error";
        case SL_ERR_DIVERGED: return "numerical-divergence";
        case SL_ERR_INVALID: return "invalid-argument";
        case SL_ERR_IO: return "io-error";
        case SL_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* sl_last_error(void) { return g_last_error.c_str(); }

sl_status sl_config_parse_text(const char* text, sl_config** out) {
    if (!text || !out) return fail(SL_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new sl_config{parse_config(text)}; });
}

sl_status sl_config_parse_file(const char* path, sl_config** out) {
    if (!path || !out) return fail(SL_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new sl_config{load_config(path)}; });
}

sl_status sl_config_render(const sl_config* config, char** out_text) {
    if (!config || !out_text) return fail(SL_ERR_INVALID, "null argument");
    return guarded([&] { *out_text = dup_string(render_config(config->config)); });
}

void sl_config_free(sl_config* config) { delete config; }

void sl_string_free(char* text) { delete[] text; }

sl_status sl_run_experiment(const sl_config* config, const char* out_dir, int threads,
                            uint64_t seed, sl_result** result) {
    if (!config) return fail(SL_ERR_INVALID, "null config");
    if (result) *result = nullptr;
    return guarded([&] {
        const std::string dir = out_dir ? out_dir : "";
        if (config->config.sweep.parameter.empty()) {
            RunSummary summary = run_single_experiment(
                config->config, dir.empty() ? config->config.output.dir : dir, seed);
            if (result) *result = new sl_result{std::move(summary)};
        } else {
            run_sweep_experiment(config->config, dir.empty() ? config->config.output.dir : dir,
                                 threads, seed);
        }
    });
}

sl_status sl_result_metric(const sl_result* result, const char* key, double* out) {
    if (!result || !key || !out) return fail(SL_ERR_INVALID, "null argument");
    const auto it = result->summary.metrics.find(key);
    if (it == result->summary.metrics.end()) return fail(SL_ERR_INVALID, "unknown metric key");
    *out = it->second;
    return SL_OK;
}

sl_status sl_result_json(const sl_result* result, char** out_text) {
    if (!result || !out_text) return fail(SL_ERR_INVALID, "null argument");
    return guarded([&] { *out_text = dup_string(result->summary.json()); });
}

void sl_result_free(sl_result* result) { delete result; }

sl_status sl_dispersion_table(const sl_config* config, double n0, double z, int m_max, int mz_max,
                              const char* csv_path) {
    if (!config || !csv_path) return fail(SL_ERR_INVALID, "null argument");
    return guarded([&] {
        const ModelParams& p = config->config.params;
        std::ofstream os(csv_path);
        if (!os) throw IoError(std::string("cannot write ") + csv_path);
        os << "m,m_z,lambda1_re,lambda1_im,lambda2_re,lambda2_im,lambda3_re,lambda3_im\n";
        char buf[40];
        auto put = [&](double v, bool last = false) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf << (last ? '\n' : ',');
        };
        const bool kinetic = config->config.model == ModelKind::KEecp;
        const int mz_lo = kinetic ? -mz_max : 0;
        const int mz_hi = kinetic ? mz_max : 0;
        for (int m = 0; m <= m_max; ++m) {
            for (int mz = mz_lo; mz <= mz_hi; ++mz) {
                const DispersionPoint pt = kinetic
                                               ? kinetic_eigenvalues({m, 0}, mz, z, n0, p)
                                               : macro_eigenvalues({m, 0}, n0, p);
                os << m << ',' << mz << ',';
                put(pt.lambda1);
                put(0.0);
                put(pt.lambda2);
                put(0.0);
                put(pt.lambda3.real());
                put(pt.lambda3.imag(), true);
            }
        }
    });
}

sl_status sl_mass_ode_table(const sl_config* config, double a_rho0, double a_h0, double a_n0,
                            double n0, double t_end, int n_rows, const char* csv_path) {
    if (!config || !csv_path) return fail(SL_ERR_INVALID, "null argument");
    if (n_rows < 2) return fail(SL_ERR_INVALID, "n_rows must be >= 2");
    if (t_end < 0.0) return fail(SL_ERR_INVALID, "t_end must be >= 0");
    return guarded([&] {
        std::ofstream os(csv_path);
        if (!os) throw IoError(std::string("cannot write ") + csv_path);
        os << "t,A_rho,A_h,A_n\n";
        char buf[40];
        auto put = [&](double v, bool last = false) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf << (last ? '\n' : ',');
        };
        for (int i = 0; i < n_rows; ++i) {
            const double t = t_end * i / (n_rows - 1);
            const MassOdeValues v =
                mass_ode_solution(a_rho0, a_h0, a_n0, n0, config->config.params, t);
            put(t);
            put(v.A_rho);
            put(v.A_h);
            put(v.A_n, true);
        }
    });
}

sl_status sl_certify(const sl_config* config, double rho_a, int* certified, double* lambda,
                     double* mu, double* alpha_min, double* lambda_b, int* n_samples) {
    if (!config) return fail(SL_ERR_INVALID, "null config");
    return guarded([&] {
        const ModelParams& p = config->config.params;
        const HypothesisConstants hc =
            hypothesis_constants(p, 4096, config->config.grid.length_x);
        const DissipativityCertificate cert = dissipativity_certificate(rho_a, p, hc);
        if (certified) *certified = cert.certified ? 1 : 0;
        if (lambda) *lambda = cert.lambda;
        if (mu) *mu = cert.mu;
        if (alpha_min) *alpha_min = cert.alpha_min;
        if (lambda_b) *lambda_b = hc.Lambda_b;
        if (n_samples) *n_samples = hc.n_samples;
    });
}

sl_status sl_lifespan(double E_in, double eps, int s, double C, double* t0) {
    if (!t0) return fail(SL_ERR_INVALID, "null output");
    return guarded([&] { *t0 = lifespan_lower_bound(E_in, eps, s, C); });
}

sl_status sl_lifespan_config(const sl_config* config, double E_in, double C, double* t0) {
    if (!config || !t0) return fail(SL_ERR_INVALID, "null argument");
    return guarded([&] {
        *t0 = lifespan_lower_bound(E_in, config->config.params.eps,
                                   config->config.params.sobolev_s, C);
    });
}

}  // extern "C"
