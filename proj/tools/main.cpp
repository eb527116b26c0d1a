// stripe-lab command line: thin shell over the C API (stripelab.h).
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "stripelab/stripelab.h"

namespace {

int exit_code_for(sl_status status) {
    switch (status) {
        case SL_OK: return 0;
        case SL_ERR_CONFIG: return 2;
        case SL_ERR_DIVERGED: return 3;
        default: return 1;
    }
}

int report(sl_status status) {
    if (status != SL_OK)
        std::fprintf(stderr, "error (%s): %s\n", sl_status_name(status), sl_last_error());
    return exit_code_for(status);
}

struct ConfigHandle {
    sl_config* ptr = nullptr;
    ~ConfigHandle() { sl_config_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stripe-lab: kinetic and macroscopic simulations of engineered E. coli stripe models"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "path to an experiment config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    app.add_option("--threads", threads, "worker threads for sweep runs")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for random initial data");

    auto* simulate = app.add_subcommand("simulate", "run a single configured experiment");
    auto* sweep = app.add_subcommand("sweep", "run the configured parameter sweep");

    auto* dispersion = app.add_subcommand("dispersion", "write the linearized dispersion table");
    double n0 = 1.0, z_arg = 0.0;
    int m_max = 8, mz_max = 2;
    dispersion->add_option("--n0", n0, "steady nutrient level n0");
    dispersion->add_option("--z", z_arg, "internal state z (kinetic model only)");
    dispersion->add_option("--m-max", m_max, "largest spatial mode");
    dispersion->add_option("--mz-max", mz_max, "largest |z frequency| (kinetic model only)");

    auto* masses = app.add_subcommand("masses", "write the total-mass ODE closed-form table");
    double a_rho0 = 1.0, a_h0 = 0.0, a_n0 = 0.0, mass_n0 = 1.0, t_end = 1.0;
    int rows = 101;
    masses->add_option("--arho0", a_rho0, "initial A_rho");
    masses->add_option("--ah0", a_h0, "initial A_h");
    masses->add_option("--an0", a_n0, "initial A_n");
    masses->add_option("--n0", mass_n0, "steady nutrient level n0");
    masses->add_option("--t-end", t_end, "final time");
    masses->add_option("--rows", rows, "number of table rows")->check(CLI::Range(2, 1000000));

    auto* certify = app.add_subcommand("certify", "evaluate the dissipativity certificate");
    double rho_a = 0.0;
    certify->add_option("--rho-a", rho_a, "steady total density rho_a")->required();

    auto* lifespan = app.add_subcommand("lifespan", "evaluate the local-lifespan lower bound");
    double e_in = 1.0, lifespan_C = 1.0;
    lifespan->add_option("--E-in", e_in, "initial energy E_in")->required();
    lifespan->add_option("--C", lifespan_C, "estimate constant C (the bound's C is not constructive)");

    CLI11_PARSE(app, argc, argv);

    ConfigHandle config;
    if (sl_status st = sl_config_parse_file(config_path.c_str(), &config.ptr); st != SL_OK)
        return report(st);

    if (simulate->parsed() || sweep->parsed()) {
        sl_result* result = nullptr;
        const sl_status st = sl_run_experiment(config.ptr, out_dir.empty() ? nullptr : out_dir.c_str(),
                                               threads, seed, &result);
        if (st != SL_OK) return report(st);
        if (result) {
            char* json = nullptr;
            if (sl_result_json(result, &json) == SL_OK) {
                std::fputs(json, stdout);
                sl_string_free(json);
            }
            sl_result_free(result);
        } else {
            std::puts("sweep complete");
        }
        return 0;
    }

    if (dispersion->parsed()) {
        const std::string path = (out_dir.empty() ? std::string(".") : out_dir) + "/dispersion.csv";
        const sl_status st =
            sl_dispersion_table(config.ptr, n0, z_arg, m_max, mz_max, path.c_str());
        if (st != SL_OK) return report(st);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }

    if (masses->parsed()) {
        const std::string path = (out_dir.empty() ? std::string(".") : out_dir) + "/masses.csv";
        const sl_status st =
            sl_mass_ode_table(config.ptr, a_rho0, a_h0, a_n0, mass_n0, t_end, rows, path.c_str());
        if (st != SL_OK) return report(st);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }

    if (certify->parsed()) {
        int certified = 0, n_samples = 0;
        double lambda = 0, mu = 0, alpha_min = 0, lambda_b = 0;
        const sl_status st = sl_certify(config.ptr, rho_a, &certified, &lambda, &mu, &alpha_min,
                                        &lambda_b, &n_samples);
        if (st != SL_OK) return report(st);
        std::printf("rho_a = %.17g\nLambda_b = %.17g (constants sampled at n = %d)\ncertified = %s\n",
                    rho_a, lambda_b, n_samples, certified ? "yes" : "no");
        if (certified)
            std::printf("lambda = %.17g\nmu = %.17g\nalpha_min = %.17g\n", lambda, mu, alpha_min);
        else
            std::puts("outside dissipativity threshold: no positive-definite certificate exists");
        return 0;
    }

    if (lifespan->parsed()) {
        double t0 = 0.0;
        const sl_status st = sl_lifespan_config(config.ptr, e_in, lifespan_C, &t0);
        if (st != SL_OK) return report(st);
        std::printf("T0 = %.17g  (E_in = %.17g, C = %.17g; eps and s from config)\n", t0, e_in,
                    lifespan_C);
        return 0;
    }

    return 0;
}
