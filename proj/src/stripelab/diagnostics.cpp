#include "stripelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stripelab/errors.hpp"
#include "stripelab/solver.hpp"

namespace stripelab {

DiagnosticsEngine::DiagnosticsEngine(const PeriodicGrid& grid, const ModelParams& params,
                                     const HypothesisConstants& constants, RunKind kind,
                                     DiagnosticsOptions options)
    : grid_(grid),
      params_(params),
      constants_(constants),
      kind_(kind),
      options_(options),
      invariant_factor_(kind == RunKind::MacroScience ? 1.0 / params.hill_k_n
                                                      : params.gamma / params.xi),
      workspace_(grid) {
    D_at_z_.resize(static_cast<std::size_t>(grid.n_z));
    for (int k = 0; k < grid.n_z; ++k) D_at_z_[k] = motility_D(grid.z_coord(k), params_);
}

double DiagnosticsEngine::second_z_moment(const KineticState& state) const {
    const SmoothedSwitch sw = chez_switch(params_);
    double num = 0.0, den = 0.0;
    for (int x = 0; x < grid_.x_nodes(); ++x) {
        const double L = sw.value(state.h[x]);
        for (int k = 0; k < grid_.n_z; ++k) {
            double dist = std::abs(grid_.z_coord(k) - L);
            dist = std::min(dist, params_.Z_w - dist);  // circle distance on T_w
            const double r = state.rho.at(x, k);
            num += r * dist * dist;
            den += r;
        }
    }
    if (den == 0.0) return DiagnosticsRecord::unset;
    return num / den;
}

std::pair<double, double> DiagnosticsEngine::energy_kinetic(const KineticState& state, int s) {
    if (s < 3) throw InvalidParameterError("energy_kinetic: requires s >= 3");
    const ScalarField varrho = integrate_z(state.rho);
    const double inv_eta1 = 1.0 / (constants_.eta + 1.0);
    const double E = workspace_.sobolev_norm_sq(state.rho, s) +
                     inv_eta1 * workspace_.sobolev_norm_sq(varrho, s) +
                     workspace_.sobolev_norm_sq(state.h, s) +
                     workspace_.sobolev_norm_sq(state.n, s);
    const double D = workspace_.grad_sobolev_norm_sq(state.rho, s, D_at_z_) +
                     0.5 * constants_.d * inv_eta1 * workspace_.grad_sobolev_norm_sq(varrho, s) +
                     params_.D_h * workspace_.grad_sobolev_norm_sq(state.h, s) +
                     0.5 * params_.beta * workspace_.sobolev_norm_sq(state.h, s) +
                     params_.D_n * workspace_.grad_sobolev_norm_sq(state.n, s);
    return {E, D};
}

std::array<double, 4> DiagnosticsEngine::energy_macro(const MacroState& state, int s) {
    if (s < 4) throw InvalidParameterError("energy_macro: requires s >= 4");
    ScalarField dtilde(grid_);
    for (int x = 0; x < grid_.x_nodes(); ++x)
        dtilde[x] = composed_motility_Dtilde(state.h[x], params_);
    const double E_l = workspace_.sobolev_norm_sq(state.rho, s) +
                       workspace_.sobolev_norm_sq(state.h, s) +
                       workspace_.sobolev_norm_sq(state.n, s);
    const double D_l = 0.5 * workspace_.grad_sobolev_norm_sq(state.rho, s, dtilde) +
                       params_.D_h * workspace_.grad_sobolev_norm_sq(state.h, s) +
                       0.5 * params_.beta * workspace_.sobolev_norm_sq(state.h, s) +
                       params_.D_n * workspace_.grad_sobolev_norm_sq(state.n, s);
    const double EE_l = workspace_.sobolev_norm_sq(dtilde, s);
    const double DD_l = params_.D_h * workspace_.grad_sobolev_norm_sq(dtilde, s);
    return {E_l, D_l, EE_l, DD_l};
}

std::pair<double, double> DiagnosticsEngine::energy_perturbation(const MacroState& state, int s,
                                                                 double rho_a) {
    if (s < 4) throw InvalidParameterError("energy_perturbation: requires s >= 4");
    const double h_a = params_.alpha * rho_a / params_.beta;
    const double dtilde_a = composed_motility_Dtilde(h_a, params_);
    ScalarField phi(grid_), psi(grid_), w(grid_), dtilde(grid_);
    for (int x = 0; x < grid_.x_nodes(); ++x) {
        phi[x] = state.rho[x] - rho_a;
        psi[x] = state.h[x] - h_a;
        dtilde[x] = composed_motility_Dtilde(state.h[x], params_);
        w[x] = dtilde[x] - dtilde_a;
    }
    const double E_g = workspace_.sobolev_norm_sq(phi, s) + workspace_.sobolev_norm_sq(psi, s) +
                       workspace_.sobolev_norm_sq(w, s);
    const double D_g = workspace_.grad_sobolev_norm_sq(phi, s, dtilde) +
                       params_.D_h * workspace_.grad_sobolev_norm_sq(psi, s) +
                       0.5 * params_.beta * workspace_.sobolev_norm_sq(psi, s) +
                       workspace_.grad_sobolev_norm_sq(dtilde, s);
    return {E_g, D_g};
}

DiagnosticsRecord DiagnosticsEngine::record(const KineticState& state) {
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_rho = mass(state.rho);
    r.mass_n = mass(state.n);
    r.combined_invariant = r.mass_rho + invariant_factor_ * r.mass_n;
    r.min_rho = field_min(state.rho);
    r.min_h = field_min(state.h);
    r.min_n = field_min(state.n);
    r.m2_z = second_z_moment(state);
    if (options_.energies) {
        const auto [E, D] = energy_kinetic(state, params_.sobolev_s);
        r.E_L = E;
        r.D_L = D;
    }
    if (options_.mode_max >= 0) {
        r.mode_rho = workspace_.mode_amplitudes(integrate_z(state.rho), options_.mode_max);
        r.mode_h = workspace_.mode_amplitudes(state.h, options_.mode_max);
        r.mode_n = workspace_.mode_amplitudes(state.n, options_.mode_max);
    }
    return r;
}

DiagnosticsRecord DiagnosticsEngine::record(const MacroState& state) {
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_rho = mass(state.rho);
    r.mass_n = mass(state.n);
    r.combined_invariant = r.mass_rho + invariant_factor_ * r.mass_n;
    r.min_rho = field_min(state.rho);
    r.min_h = field_min(state.h);
    r.min_n = field_min(state.n);
    if (options_.energies && kind_ == RunKind::MacroAd) {
        const auto e = energy_macro(state, params_.sobolev_s);
        r.E_l = e[0];
        r.D_l = e[1];
        r.EE_l = e[2];
        r.DD_l = e[3];
    }
    if (options_.perturbation_rho_a) {
        const auto [Eg, Dg] =
            energy_perturbation(state, params_.sobolev_s, *options_.perturbation_rho_a);
        r.E_g = Eg;
        r.D_g = Dg;
    }
    if (options_.mode_max >= 0) {
        r.mode_rho = workspace_.mode_amplitudes(state.rho, options_.mode_max);
        r.mode_h = workspace_.mode_amplitudes(state.h, options_.mode_max);
        r.mode_n = workspace_.mode_amplitudes(state.n, options_.mode_max);
    }
    return r;
}

GronwallAudit gronwall_audit(const std::vector<DiagnosticsRecord>& records, double eps, int s) {
    if (!(eps > 0.0)) throw InvalidParameterError("gronwall_audit: eps must be positive");
    if (records.size() < 2) throw ResolutionError("gronwall_audit: needs at least 10 records");
    // centered differences need uniform spacing; a truncated final step only
    // shortens the usable prefix
    const double dt0 = records[1].t - records[0].t;
    std::size_t count = 2;
    while (count < records.size() &&
           std::abs(records[count].t - records[count - 1].t - dt0) <= 1e-9 * std::max(dt0, 1e-300))
        ++count;
    if (count < 10) throw ResolutionError("gronwall_audit: needs at least 10 uniformly spaced records");
    // kinetic records carry E_L/D_L; macroscopic ones E_l/D_l. The audited
    // inequality shape is the same.
    const bool kinetic = !std::isnan(records.front().E_L);
    if (!kinetic && std::isnan(records.front().E_l))
        throw InvalidParameterError("gronwall_audit: records carry no energies");
    auto energy = [&](const DiagnosticsRecord& r) { return kinetic ? r.E_L : r.E_l; };
    auto rate = [&](const DiagnosticsRecord& r) { return kinetic ? r.D_L : r.D_l; };
    GronwallAudit audit;
    const double pref = 1.0 + 1.0 / eps;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        const double E = energy(records[i]);
        const double D = rate(records[i]);
        const double dE = (energy(records[i + 1]) - energy(records[i - 1])) / (2.0 * dt0);
        const double numer = dE + D;
        const double denom = pref * (1.0 + std::pow(E, 0.5 * s)) * E;
        if (denom <= 0.0) {
            if (numer > 0.0) ++audit.violations;
            continue;
        }
        audit.C = std::max(audit.C, numer / denom);
    }
    return audit;
}

RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                             double window_start_frac) {
    if (times.size() != values.size() || times.size() < 3)
        throw InvalidParameterError("fit_exponential_rate: need >= 3 samples");
    const double t_cut = times.front() + window_start_frac * (times.back() - times.front());
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] + 1e-15 < t_cut) continue;
        if (!(values[i] > 0.0))
            throw InvalidParameterError("fit_exponential_rate: non-positive value in fit window");
        ts.push_back(times[i]);
        ys.push_back(std::log(values[i]));
    }
    if (ts.size() < 2) throw InvalidParameterError("fit_exponential_rate: window too small");
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw InvalidParameterError("fit_exponential_rate: degenerate window");
    RateFit fit;
    fit.rate = (n * sty - st * sy) / denom;
    const double icpt = (sy - fit.rate * st) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (icpt + fit.rate * ts[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

RateFit mode_growth_rate(const std::vector<DiagnosticsRecord>& records, FieldSelector field,
                         int mode, double window_start_frac) {
    std::vector<double> ts, vs;
    for (const auto& r : records) {
        const std::vector<double>& amps =
            field == FieldSelector::Rho ? r.mode_rho : (field == FieldSelector::H ? r.mode_h : r.mode_n);
        if (mode < 0 || mode >= static_cast<int>(amps.size()))
            throw InvalidParameterError("mode_growth_rate: mode not tracked in records");
        ts.push_back(r.t);
        vs.push_back(amps[static_cast<std::size_t>(mode)]);
    }
    return fit_exponential_rate(ts, vs, window_start_frac);
}

namespace {

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
    if (records.empty()) throw InvalidParameterError("write_diagnostics_csv: no records");
    const DiagnosticsRecord& first = records.front();
    struct Col {
        std::string name;
        double DiagnosticsRecord::* member;
    };
    std::vector<Col> cols = {{"t", &DiagnosticsRecord::t},
                             {"mass_rho", &DiagnosticsRecord::mass_rho},
                             {"mass_n", &DiagnosticsRecord::mass_n},
                             {"combined_invariant", &DiagnosticsRecord::combined_invariant},
                             {"min_rho", &DiagnosticsRecord::min_rho},
                             {"min_h", &DiagnosticsRecord::min_h},
                             {"min_n", &DiagnosticsRecord::min_n}};
    auto add_if = [&](const char* name, double DiagnosticsRecord::* m) {
        if (!std::isnan(first.*m)) cols.push_back({name, m});
    };
    add_if("E_L", &DiagnosticsRecord::E_L);
    add_if("D_L", &DiagnosticsRecord::D_L);
    add_if("E_l", &DiagnosticsRecord::E_l);
    add_if("D_l", &DiagnosticsRecord::D_l);
    add_if("EE_l", &DiagnosticsRecord::EE_l);
    add_if("DD_l", &DiagnosticsRecord::DD_l);
    add_if("E_g", &DiagnosticsRecord::E_g);
    add_if("D_g", &DiagnosticsRecord::D_g);
    add_if("m2_z", &DiagnosticsRecord::m2_z);

    std::string line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) line += ',';
        line += cols[c].name;
    }
    auto mode_header = [&](const char* base, const std::vector<double>& v) {
        for (std::size_t m = 0; m < v.size(); ++m)
            line += "," + std::string(base) + "_" + std::to_string(m);
    };
    mode_header("mode_rho", first.mode_rho);
    mode_header("mode_h", first.mode_h);
    mode_header("mode_n", first.mode_n);
    os << line << '\n';

    for (const auto& r : records) {
        line.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) line += ',';
            append_g17(line, r.*(cols[c].member));
        }
        auto mode_row = [&](const std::vector<double>& v) {
            for (double x : v) {
                line += ',';
                append_g17(line, x);
            }
        };
        mode_row(r.mode_rho);
        mode_row(r.mode_h);
        mode_row(r.mode_n);
        os << line << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_diagnostics_csv(os, records);
}

}  // namespace stripelab
