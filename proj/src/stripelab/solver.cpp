#include "stripelab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "stripelab/errors.hpp"

namespace stripelab {

namespace {

constexpr int kConstantSamples = 4096;
constexpr double kTwoPi = 6.283185307179586476925287;

void check_grid_params(const PeriodicGrid& grid, const ModelParams& params) {
    grid.validate();
    if (grid.Z_w != params.Z_w)
        throw InvalidParameterError("grid Z_w and params Z_w must agree");
}

double end_tolerance(double t_end) { return 1e-12 * std::max(1.0, std::abs(t_end)); }

}  // namespace

KineticSolver::KineticSolver(const PeriodicGrid& grid, const ModelParams& params)
    : grid_(grid), params_(params) {
    check_grid_params(grid, params);
    params_.validate(false);
    constants_ = hypothesis_constants(params_, kConstantSamples, grid.length_x);
    D_at_z_.resize(static_cast<std::size_t>(grid.n_z));
    for (int k = 0; k < grid.n_z; ++k) D_at_z_[k] = motility_D(grid.z_coord(k), params_);
}

double KineticSolver::admissible_dt() const {
    const double dx2 = grid_.dx() * grid_.dx();
    const double diff = dx2 / (2.0 * grid_.dim_x * constants_.a);
    const double diff_h = dx2 / (2.0 * grid_.dim_x * params_.D_h);
    const double diff_n = dx2 / (2.0 * grid_.dim_x * params_.D_n);
    const double zconv = params_.eps * grid_.dz() / (params_.k_V * (params_.Z_w + params_.Z_w));
    return std::min(std::min(diff, zconv), std::min(diff_h, diff_n));
}

void KineticSolver::rhs(const KineticState& state, KineticState& out, bool freeze_h_n) const {
    require_same_grid(state.rho.grid(), grid_);
    require_same_grid(state.h.grid(), grid_);
    require_same_grid(state.n.grid(), grid_);
    const ScalarField varrho = integrate_z(state.rho);
    const KineticField lap_rho = laplacian(state.rho);
    const KineticField zflux = z_flux_divergence(state.rho, state.h, params_, params_.eps);

    out.t = state.t;
    out.rho = KineticField(grid_);
    out.h = ScalarField(grid_);
    out.n = ScalarField(grid_);
    const int nz = grid_.n_z;
    for (int x = 0; x < grid_.x_nodes(); ++x) {
        const double nx = state.n[x];
        for (int k = 0; k < nz; ++k)
            out.rho.at(x, k) = D_at_z_[static_cast<std::size_t>(k)] * lap_rho.at(x, k) -
                               zflux.at(x, k) + params_.gamma * nx * state.rho.at(x, k);
    }
    if (!freeze_h_n) {
        const ScalarField lap_h = laplacian(state.h);
        const ScalarField lap_n = laplacian(state.n);
        for (int x = 0; x < grid_.x_nodes(); ++x) {
            out.h[x] = params_.D_h * lap_h[x] + params_.alpha * varrho[x] - params_.beta * state.h[x];
            out.n[x] = params_.D_n * lap_n[x] - params_.xi * varrho[x] * state.n[x];
        }
    }
}

namespace {

template <class State>
State heun_combine(const State& u, const State& u2) {
    State r = u;
    r.t = u2.t;
    for (int i = 0; i < r.rho.size(); ++i) r.rho[i] = 0.5 * (u.rho[i] + u2.rho[i]);
    for (int i = 0; i < r.h.size(); ++i) r.h[i] = 0.5 * (u.h[i] + u2.h[i]);
    for (int i = 0; i < r.n.size(); ++i) r.n[i] = 0.5 * (u.n[i] + u2.n[i]);
    return r;
}

template <class State>
void axpy_state(State& u, double dt, const State& du) {
    for (int i = 0; i < u.rho.size(); ++i) u.rho[i] += dt * du.rho[i];
    for (int i = 0; i < u.h.size(); ++i) u.h[i] += dt * du.h[i];
    for (int i = 0; i < u.n.size(); ++i) u.n[i] += dt * du.n[i];
    u.t += dt;
}

template <class State>
bool state_finite(const State& s) {
    return field_finite(s.rho) && field_finite(s.h) && field_finite(s.n);
}

}  // namespace

KineticState KineticSolver::step(const KineticState& state, double dt,
                                 const StepControl& control) const {
    const double bound = control.cfl_safety * admissible_dt();
    if (dt > bound * (1.0 + 1e-12))
        throw CflError("kinetic step: dt exceeds the admissible CFL bound");
    KineticState du(state);
    rhs(state, du, control.freeze_h_n);
    KineticState u1 = state;
    axpy_state(u1, dt, du);
    rhs(u1, du, control.freeze_h_n);
    axpy_state(u1, dt, du);
    KineticState out = heun_combine(state, u1);
    out.t = state.t + dt;
    if (!state_finite(out)) throw DivergenceError("kinetic step: non-finite values");
    return out;
}

template <class Solver, class State, class Sink>
static RunResult<State> run_loop(const Solver& solver, const State& initial,
                                 const StepControl& control, DiagnosticsEngine* diagnostics,
                                 const Sink& snapshot_sink) {
    RunResult<State> result;
    State state = initial;
    const double nominal =
        control.dt > 0.0 ? control.dt : control.cfl_safety * solver.admissible_dt();
    if (nominal > control.cfl_safety * solver.admissible_dt() * (1.0 + 1e-12))
        throw CflError("run: configured dt exceeds the admissible CFL bound");
    result.dt_used = nominal;

    const int cadence = std::max(1, control.snapshot_every);
    auto emit = [&](const State& s, long step) {
        if (diagnostics) result.records.push_back(diagnostics->record(s));
        if (snapshot_sink) snapshot_sink(s, step);
    };
    emit(state, 0);
    long step = 0;
    const double tol = end_tolerance(control.t_end);
    while (state.t < control.t_end - tol) {
        const double dt = std::min(nominal, control.t_end - state.t);
        state = solver.step(state, dt, control);
        ++step;
        if (state.t < control.t_end - tol && step % cadence == 0) emit(state, step);
    }
    if (step > 0) emit(state, step);
    result.steps = step;
    result.final_state = std::move(state);
    return result;
}

RunResult<KineticState> KineticSolver::run(const KineticState& initial, const StepControl& control,
                                           DiagnosticsEngine* diagnostics,
                                           const KineticSnapshotSink& snapshot_sink) const {
    return run_loop(*this, initial, control, diagnostics, snapshot_sink);
}

MacroSolver::MacroSolver(const PeriodicGrid& grid, const ModelParams& params, MacroModel model)
    : grid_(grid),
      params_(params),
      model_(model),
      mobility_switch_(science_mobility_switch(params)) {
    check_grid_params(grid, params);
    params_.validate(true);
    constants_ = hypothesis_constants(params_, kConstantSamples, grid.length_x);
}

double MacroSolver::mobility(double h) const {
    if (model_ == MacroModel::AdEecp) return composed_motility_Dtilde(h, params_);
    return mobility_switch_.value(h);
}

double MacroSolver::admissible_dt() const {
    const double dx2 = grid_.dx() * grid_.dx();
    const double sup_mob = model_ == MacroModel::AdEecp
                               ? constants_.sup_D
                               : std::max(params_.hill_D_rho, params_.hill_D_rho0);
    const double diff = dx2 / (2.0 * grid_.dim_x * sup_mob);
    const double diff_h = dx2 / (2.0 * grid_.dim_x * params_.D_h);
    const double diff_n = dx2 / (2.0 * grid_.dim_x * params_.D_n);
    return std::min(diff, std::min(diff_h, diff_n));
}

void MacroSolver::rhs(const MacroState& state, MacroState& out, bool freeze_h_n) const {
    require_same_grid(state.rho.grid(), grid_);
    require_same_grid(state.h.grid(), grid_);
    require_same_grid(state.n.grid(), grid_);
    ScalarField mob_rho(grid_);
    for (int x = 0; x < grid_.x_nodes(); ++x) mob_rho[x] = mobility(state.h[x]) * state.rho[x];
    const ScalarField lap_mob_rho = laplacian(mob_rho);

    out.t = state.t;
    out.rho = ScalarField(grid_);
    out.h = ScalarField(grid_);
    out.n = ScalarField(grid_);
    for (int x = 0; x < grid_.x_nodes(); ++x) {
        double growth;  // shared by the rho and n reactions so mass cancels
        if (model_ == MacroModel::AdEecp) {
            growth = state.n[x] * state.rho[x];
            out.rho[x] = lap_mob_rho[x] + params_.gamma * growth;
            if (!freeze_h_n) out.n[x] = -params_.xi * growth;
        } else {
            const double n2 = state.n[x] * state.n[x];
            growth = params_.gamma * n2 * state.rho[x] /
                     (n2 + params_.hill_K_n * params_.hill_K_n);
            out.rho[x] = lap_mob_rho[x] + growth;
            if (!freeze_h_n) out.n[x] = -params_.hill_k_n * growth;
        }
    }
    if (!freeze_h_n) {
        const ScalarField lap_h = laplacian(state.h);
        const ScalarField lap_n = laplacian(state.n);
        for (int x = 0; x < grid_.x_nodes(); ++x) {
            out.h[x] =
                params_.D_h * lap_h[x] + params_.alpha * state.rho[x] - params_.beta * state.h[x];
            out.n[x] += params_.D_n * lap_n[x];
        }
    }
}

MacroState MacroSolver::step(const MacroState& state, double dt, const StepControl& control) const {
    const double bound = control.cfl_safety * admissible_dt();
    if (dt > bound * (1.0 + 1e-12))
        throw CflError("macro step: dt exceeds the admissible CFL bound");
    MacroState du(state);
    rhs(state, du, control.freeze_h_n);
    MacroState u1 = state;
    axpy_state(u1, dt, du);
    rhs(u1, du, control.freeze_h_n);
    axpy_state(u1, dt, du);
    MacroState out = heun_combine(state, u1);
    out.t = state.t + dt;
    if (!state_finite(out)) throw DivergenceError("macro step: non-finite values");
    return out;
}

RunResult<MacroState> MacroSolver::run(const MacroState& initial, const StepControl& control,
                                       DiagnosticsEngine* diagnostics,
                                       const MacroSnapshotSink& snapshot_sink) const {
    return run_loop(*this, initial, control, diagnostics, snapshot_sink);
}

PerturbationDecayResult perturbation_decay_run(double rho_a, double amplitude, int mode,
                                               const PeriodicGrid& grid, const ModelParams& params,
                                               const StepControl& control,
                                               FieldSelector perturb_field) {
    if (rho_a < 0.0) throw InvalidParameterError("perturbation_decay_run: rho_a must be >= 0");
    if (amplitude < 0.0 || amplitude > 1e-3 * std::max(rho_a, 1.0))
        throw InvalidParameterError("perturbation_decay_run: amplitude must be small and >= 0");
    if (perturb_field == FieldSelector::N)
        throw InvalidParameterError("perturbation_decay_run: the perturbed run keeps n = 0");
    MacroSolver solver(grid, params, MacroModel::AdEecp);
    PerturbationDecayResult result;
    result.outside_threshold = rho_a >= solver.constants().Lambda_b;

    const double h_a = params.alpha * rho_a / params.beta;
    MacroState state;
    state.rho = ScalarField(grid, rho_a);
    state.h = ScalarField(grid, h_a);
    state.n = ScalarField(grid);
    if (amplitude > 0.0) {
        ScalarField& target = perturb_field == FieldSelector::Rho ? state.rho : state.h;
        for (int x = 0; x < grid.x_nodes(); ++x) {
            const int i = grid.dim_x == 1 ? x : x / grid.n_x;
            target[x] += amplitude * std::cos(kTwoPi * mode * grid.x_coord(i) / grid.length_x);
        }
    }

    DiagnosticsOptions opts;
    opts.energies = false;  // E_g carries the story here
    opts.perturbation_rho_a = rho_a;
    DiagnosticsEngine engine(grid, params, solver.constants(), RunKind::MacroAd, opts);
    auto run = solver.run(state, control, &engine);
    result.records = std::move(run.records);

    std::vector<double> ts, eg;
    for (const auto& r : result.records) {
        ts.push_back(r.t);
        eg.push_back(r.E_g);
    }
    const double floor_eg = 1e-280;
    bool all_tiny = true;
    for (double v : eg)
        if (v > floor_eg) all_tiny = false;
    if (all_tiny) {
        result.fitted_rate = 0.0;
        result.energy_monotone_after_transient = true;
        return result;
    }
    const RateFit fit = fit_exponential_rate(ts, eg, 0.1);
    result.fitted_rate = fit.rate;
    result.fit_residual = fit.residual;
    const double t_cut = ts.front() + 0.1 * (ts.back() - ts.front());
    bool monotone = true;
    double prev = -1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_cut) continue;
        if (prev >= 0.0 && eg[i] > prev * (1.0 + 1e-10)) monotone = false;
        prev = eg[i];
    }
    result.energy_monotone_after_transient = monotone;
    return result;
}

}  // namespace stripelab
