#include "stripelab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stripelab/errors.hpp"
#include "stripelab/io.hpp"

namespace stripelab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Periodized Gaussian profile via the minimum-image distance.
double periodic_gaussian(double x, double center, double sigma, double period) {
    double d = std::fmod(std::abs(x - center), period);
    d = std::min(d, period - d);
    return std::exp(-0.5 * d * d / (sigma * sigma));
}

// Band-limited nonnegative random field: low modes with random coefficients,
// shifted so the minimum sits at a tenth of the spread above zero.
void fill_random_field(std::vector<double>& v, const PeriodicGrid& g, double level, double spread,
                       std::mt19937_64& rng, bool with_z) {
    const int nx = g.n_x;
    std::vector<double> ax, bx;
    const int m_max = 3, mz_max = 2;
    for (int m = 1; m <= m_max; ++m) {
        ax.push_back(2.0 * uniform01(rng) - 1.0);
        bx.push_back(2.0 * uniform01(rng) - 1.0);
    }
    std::vector<double> az, bz;
    for (int m = 1; m <= mz_max; ++m) {
        az.push_back(2.0 * uniform01(rng) - 1.0);
        bz.push_back(2.0 * uniform01(rng) - 1.0);
    }
    auto xprofile = [&](double x) {
        double s = 0.0;
        for (int m = 1; m <= m_max; ++m) {
            const double arg = kTwoPi * m * x / g.length_x;
            s += ax[static_cast<std::size_t>(m - 1)] * std::cos(arg) +
                 bx[static_cast<std::size_t>(m - 1)] * std::sin(arg);
        }
        return s;
    };
    auto zprofile = [&](double z) {
        double s = 0.0;
        for (int m = 1; m <= mz_max; ++m) {
            const double arg = kTwoPi * m * z / g.Z_w;
            s += az[static_cast<std::size_t>(m - 1)] * std::cos(arg) +
                 bz[static_cast<std::size_t>(m - 1)] * std::sin(arg);
        }
        return s;
    };
    std::size_t idx = 0;
    double vmin = 1e300;
    for (int x = 0; x < g.x_nodes(); ++x) {
        const double xc = g.dim_x == 1 ? g.x_coord(x) : g.x_coord(x / nx);
        const double yc = g.dim_x == 1 ? 0.0 : g.x_coord(x % nx);
        const double px = xprofile(xc) + (g.dim_x == 2 ? xprofile(yc + 1.0) : 0.0);
        if (with_z) {
            for (int k = 0; k < g.n_z; ++k) {
                v[idx] = px + zprofile(g.z_coord(k));
                vmin = std::min(vmin, v[idx]);
                ++idx;
            }
        } else {
            v[idx] = px;
            vmin = std::min(vmin, v[idx]);
            ++idx;
        }
    }
    for (auto& x : v) x = level + spread * (x - vmin + 0.1);
}

}  // namespace

KineticState build_kinetic_initial(const InitialConfig& init, const PeriodicGrid& grid,
                                   const ModelParams& params, std::uint64_t seed) {
    KineticState s;
    s.rho = KineticField(grid);
    s.h = ScalarField(grid, init.h0);
    s.n = ScalarField(grid, init.n0);

    const SmoothedSwitch sw = chez_switch(params);
    auto z_center_for = [&](double h) {
        return init.z_center >= 0.0 ? init.z_center : sw.value(h);
    };

    switch (init.kind) {
        case InitialKind::Constant: {
            // rho0 is the z-integrated density of a z-uniform column
            const double val = init.rho0 / params.Z_w;
            for (int i = 0; i < s.rho.size(); ++i) s.rho[i] = val;
            break;
        }
        case InitialKind::GaussianBump:
        case InitialKind::Concentrated: {
            // x-profile times a unit-z-mass bump at z_center (default L_ell(h0));
            // gaussian-bump defaults to the motile state near z = Z_w.
            const double zc = init.kind == InitialKind::GaussianBump && init.z_center < 0.0
                                  ? grid.Z_w
                                  : z_center_for(init.h0);
            std::vector<double> zprof(static_cast<std::size_t>(grid.n_z));
            double zsum = 0.0;
            for (int k = 0; k < grid.n_z; ++k) {
                zprof[static_cast<std::size_t>(k)] =
                    periodic_gaussian(grid.z_coord(k), zc, init.sigma_z, grid.Z_w);
                zsum += zprof[static_cast<std::size_t>(k)];
            }
            const double znorm = 1.0 / (zsum * grid.dz());
            for (int x = 0; x < grid.x_nodes(); ++x) {
                const double xc = grid.dim_x == 1 ? grid.x_coord(x) : grid.x_coord(x / grid.n_x);
                double profile =
                    init.rho0 +
                    init.amplitude * periodic_gaussian(xc, init.x_center, init.sigma_x, grid.length_x);
                if (grid.dim_x == 2)
                    profile = init.rho0 + init.amplitude *
                                              periodic_gaussian(xc, init.x_center, init.sigma_x,
                                                                grid.length_x) *
                                              periodic_gaussian(grid.x_coord(x % grid.n_x),
                                                                init.x_center, init.sigma_x,
                                                                grid.length_x);
                for (int k = 0; k < grid.n_z; ++k)
                    s.rho.at(x, k) = profile * zprof[static_cast<std::size_t>(k)] * znorm;
            }
            break;
        }
        case InitialKind::FourierMode: {
            const double val = init.rho0 / params.Z_w;
            for (int i = 0; i < s.rho.size(); ++i) s.rho[i] = val;
            for (int x = 0; x < grid.x_nodes(); ++x) {
                const double xc = grid.dim_x == 1 ? grid.x_coord(x) : grid.x_coord(x / grid.n_x);
                const double wave = init.amplitude * std::cos(kTwoPi * init.mode * xc / grid.length_x);
                switch (init.field) {
                    case FieldSelector::Rho:
                        for (int k = 0; k < grid.n_z; ++k) s.rho.at(x, k) += wave / params.Z_w;
                        break;
                    case FieldSelector::H: s.h[x] += wave; break;
                    case FieldSelector::N: s.n[x] += wave; break;
                }
            }
            break;
        }
        case InitialKind::Random: {
            std::mt19937_64 rng(seed);
            fill_random_field(s.rho.values(), grid, init.rho0 / params.Z_w,
                              init.amplitude / params.Z_w, rng, true);
            fill_random_field(s.h.values(), grid, init.h0, init.amplitude, rng, false);
            if (init.n0 > 0.0)
                fill_random_field(s.n.values(), grid, init.n0, init.amplitude, rng, false);
            break;
        }
    }
    return s;
}

MacroState build_macro_initial(const InitialConfig& init, const PeriodicGrid& grid,
                               const ModelParams& params, std::uint64_t seed) {
    (void)params;
    MacroState s;
    s.rho = ScalarField(grid, init.rho0);
    s.h = ScalarField(grid, init.h0);
    s.n = ScalarField(grid, init.n0);
    switch (init.kind) {
        case InitialKind::Constant:
            break;
        case InitialKind::GaussianBump:
        case InitialKind::Concentrated:
            for (int x = 0; x < grid.x_nodes(); ++x) {
                const double xc = grid.dim_x == 1 ? grid.x_coord(x) : grid.x_coord(x / grid.n_x);
                double bumpv = periodic_gaussian(xc, init.x_center, init.sigma_x, grid.length_x);
                if (grid.dim_x == 2)
                    bumpv *= periodic_gaussian(grid.x_coord(x % grid.n_x), init.x_center,
                                               init.sigma_x, grid.length_x);
                s.rho[x] += init.amplitude * bumpv;
            }
            break;
        case InitialKind::FourierMode:
            for (int x = 0; x < grid.x_nodes(); ++x) {
                const double xc = grid.dim_x == 1 ? grid.x_coord(x) : grid.x_coord(x / grid.n_x);
                const double wave = init.amplitude * std::cos(kTwoPi * init.mode * xc / grid.length_x);
                switch (init.field) {
                    case FieldSelector::Rho: s.rho[x] += wave; break;
                    case FieldSelector::H: s.h[x] += wave; break;
                    case FieldSelector::N: s.n[x] += wave; break;
                }
            }
            break;
        case InitialKind::Random: {
            std::mt19937_64 rng(seed);
            fill_random_field(s.rho.values(), grid, init.rho0, init.amplitude, rng, false);
            fill_random_field(s.h.values(), grid, init.h0, init.amplitude, rng, false);
            if (init.n0 > 0.0) fill_random_field(s.n.values(), grid, init.n0, init.amplitude, rng, false);
            break;
        }
    }
    return s;
}

std::string RunSummary::json() const {
    nlohmann::ordered_json j;
    j["model"] = model;
    j["steps"] = steps;
    j["dt"] = dt;
    j["t_end"] = t_end;
    for (const auto& [k, v] : metrics) j[k] = v;
    return j.dump(2) + "\n";
}

namespace {

void add_fit_metrics(RunSummary& summary, const std::vector<DiagnosticsRecord>& records,
                     double window_start) {
    auto try_fit = [&](FieldSelector f, const char* base) {
        for (int m = 1; m <= 3; ++m) {
            if (records.front().mode_rho.size() <= static_cast<std::size_t>(m)) break;
            try {
                const RateFit fit = mode_growth_rate(records, f, m, window_start);
                summary.metrics[std::string("rate_") + base + "_m" + std::to_string(m)] = fit.rate;
            } catch (const Error&) {
                // amplitude hit zero inside the window; nothing to report
            }
        }
    };
    try_fit(FieldSelector::Rho, "rho");
    try_fit(FieldSelector::H, "h");

    if (!std::isnan(records.front().m2_z)) {
        std::vector<double> ts, m2;
        for (const auto& r : records) {
            ts.push_back(r.t);
            m2.push_back(r.m2_z);
        }
        try {
            summary.metrics["m2_decay_rate"] = fit_exponential_rate(ts, m2, window_start).rate;
        } catch (const Error&) {
        }
    }
}

void finish_summary(RunSummary& summary, const std::vector<DiagnosticsRecord>& records,
                    double window_start, double positivity_tol) {
    double drift = 0.0;
    const double M0 = records.front().combined_invariant;
    double min_rho = 1e300, min_h = 1e300, min_n = 1e300;
    for (const auto& r : records) {
        const double d = M0 != 0.0 ? std::abs(r.combined_invariant / M0 - 1.0)
                                   : std::abs(r.combined_invariant);
        drift = std::max(drift, d);
        min_rho = std::min(min_rho, r.min_rho);
        min_h = std::min(min_h, r.min_h);
        min_n = std::min(min_n, r.min_n);
    }
    summary.metrics["invariant_rel_drift"] = drift;
    summary.metrics["min_rho"] = min_rho;
    summary.metrics["min_h"] = min_h;
    summary.metrics["min_n"] = min_n;
    summary.metrics["positivity_ok"] =
        (std::min({min_rho, min_h, min_n}) >= -positivity_tol) ? 1.0 : 0.0;
    summary.metrics["mass_rho_final"] = records.back().mass_rho;
    summary.metrics["mass_n_final"] = records.back().mass_n;
    add_fit_metrics(summary, records, window_start);
}

std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%06ld.txt", step);
    return buf;
}

}  // namespace

RunSummary run_single_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 std::uint64_t seed) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const PeriodicGrid grid = config.make_grid();
    RunSummary summary;
    summary.model = model_kind_name(config.model);
    summary.t_end = config.step.t_end;

    DiagnosticsOptions opts;
    opts.energies = config.diagnostics.energies;
    opts.mode_max = config.diagnostics.mode_max;
    const double wstart = config.diagnostics.fit_window_start;

    std::vector<DiagnosticsRecord> records;
    if (config.model == ModelKind::KEecp) {
        KineticSolver solver(grid, config.params);
        DiagnosticsEngine engine(grid, config.params, solver.constants(), RunKind::Kinetic, opts);
        KineticSnapshotSink sink;
        if (config.output.write_snapshots)
            sink = [&](const KineticState& s, long step) {
                write_snapshot(out_dir + "/" + snapshot_name(step), s);
            };
        const KineticState initial = build_kinetic_initial(config.initial, grid, config.params, seed);
        auto run = solver.run(initial, config.step, &engine, sink);
        records = std::move(run.records);
        summary.steps = run.steps;
        summary.dt = run.dt_used;
    } else {
        const MacroModel mm =
            config.model == ModelKind::AdEecp ? MacroModel::AdEecp : MacroModel::Science2011;
        MacroSolver solver(grid, config.params, mm);
        DiagnosticsEngine engine(grid, config.params, solver.constants(),
                                 mm == MacroModel::AdEecp ? RunKind::MacroAd : RunKind::MacroScience,
                                 opts);
        MacroSnapshotSink sink;
        if (config.output.write_snapshots)
            sink = [&](const MacroState& s, long step) {
                write_snapshot(out_dir + "/" + snapshot_name(step), s);
            };
        const MacroState initial = build_macro_initial(config.initial, grid, config.params, seed);
        auto run = solver.run(initial, config.step, &engine, sink);
        records = std::move(run.records);
        summary.steps = run.steps;
        summary.dt = run.dt_used;
    }

    write_diagnostics_csv(out_dir + "/diagnostics.csv", records);
    finish_summary(summary, records, wstart, config.step.positivity_tol);
    std::ofstream js(out_dir + "/summary.json");
    if (!js) throw IoError("cannot write " + out_dir + "/summary.json");
    js << summary.json();
    return summary;
}

void run_sweep_experiment(const ExperimentConfig& config, const std::string& out_dir, int threads,
                          std::uint64_t seed) {
    config.validate();
    if (config.sweep.parameter.empty())
        throw ConfigError("run_sweep_experiment: config has no [sweep] section");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    struct Task {
        ExperimentConfig config;
        std::string dir;
        double value;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < config.sweep.values.size(); ++i) {
        Task t;
        t.config = config;
        t.config.sweep = {};
        t.value = config.sweep.values[i];
        set_param_by_name(t.config.params, config.sweep.parameter, t.value);
        char buf[64];
        std::snprintf(buf, sizeof buf, "run_%03zu_%s", i, config.sweep.parameter.c_str());
        t.dir = out_dir + "/" + buf;
        tasks.push_back(std::move(t));
    }

    std::vector<RunSummary> summaries(tasks.size());
    std::vector<std::string> failures(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                summaries[i] = run_single_experiment(tasks[i].config, tasks[i].dir, seed);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (!failures[i].empty())
            throw Error("sweep run " + tasks[i].dir + " failed: " + failures[i]);

    // comparison CSV across the sweep: value column plus every summary metric
    std::ofstream cs(out_dir + "/sweep_summary.csv");
    if (!cs) throw IoError("cannot write " + out_dir + "/sweep_summary.csv");
    std::vector<std::string> keys;
    for (const auto& [k, v] : summaries.front().metrics) keys.push_back(k);
    cs << config.sweep.parameter;
    for (const auto& k : keys) cs << ',' << k;
    cs << '\n';
    char buf[40];
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", tasks[i].value);
        cs << buf;
        for (const auto& k : keys) {
            const auto it = summaries[i].metrics.find(k);
            std::snprintf(buf, sizeof buf, "%.17g",
                          it == summaries[i].metrics.end()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : it->second);
            cs << ',' << buf;
        }
        cs << '\n';
    }
}

void run_experiment(const ExperimentConfig& config, const std::string& out_dir_override,
                    int threads, std::uint64_t seed) {
    const std::string dir = out_dir_override.empty() ? config.output.dir : out_dir_override;
    if (config.sweep.parameter.empty())
        run_single_experiment(config, dir, seed);
    else
        run_sweep_experiment(config, dir, threads, seed);
}

}  // namespace stripelab
