#include "stripelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stripelab/errors.hpp"

namespace stripelab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double parse_double(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    return x;
}

long parse_int(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(where + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(where + ": empty list element");
        out.push_back(parse_double(item, where));
    }
    if (out.empty()) throw ConfigError(where + ": expected a comma-separated list");
    return out;
}

struct ParamKey {
    const char* name;
    double ModelParams::* member;
};

constexpr ParamKey kParamDoubles[] = {
    {"gamma", &ModelParams::gamma},
    {"D_h", &ModelParams::D_h},
    {"D_n", &ModelParams::D_n},
    {"alpha", &ModelParams::alpha},
    {"beta", &ModelParams::beta},
    {"xi", &ModelParams::xi},
    {"k_V", &ModelParams::k_V},
    {"Z_w", &ModelParams::Z_w},
    {"h_bar", &ModelParams::h_bar},
    {"ell", &ModelParams::ell},
    {"s0", &ModelParams::s0},
    {"eps", &ModelParams::eps},
    {"hill_K_h", &ModelParams::hill_K_h},
    {"hill_K_n", &ModelParams::hill_K_n},
    {"hill_k_n", &ModelParams::hill_k_n},
    {"hill_D_rho", &ModelParams::hill_D_rho},
    {"hill_D_rho0", &ModelParams::hill_D_rho0},
    {"lambda_c", &ModelParams::lambda_c},
    {"lambda_a", &ModelParams::lambda_a},
    {"mu_c", &ModelParams::mu_c},
    {"mu_a", &ModelParams::mu_a},
};

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const auto* table = [] {
        auto* t = new std::map<std::string, std::map<std::string, Setter>>;
        auto& model = (*t)["model"];
        model["kind"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            if (v == "k-eecp")
                c.model = ModelKind::KEecp;
            else if (v == "ad-eecp")
                c.model = ModelKind::AdEecp;
            else if (v == "science-2011")
                c.model = ModelKind::Science2011;
            else
                throw ConfigError(w + ": kind must be k-eecp, ad-eecp or science-2011");
        };

        auto& params = (*t)["params"];
        for (const auto& pk : kParamDoubles) {
            const auto member = pk.member;
            params[pk.name] = [member](ExperimentConfig& c, const std::string& v,
                                       const std::string& w) {
                c.params.*member = parse_double(v, w);
            };
        }
        params["sobolev_s"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.params.sobolev_s = static_cast<int>(parse_int(v, w));
        };
        params["motility_profile"] = [](ExperimentConfig& c, const std::string& v,
                                        const std::string& w) {
            if (v == "constant")
                c.params.motility_profile = MotilityProfile::Constant;
            else if (v == "cosine")
                c.params.motility_profile = MotilityProfile::Cosine;
            else
                throw ConfigError(w + ": motility_profile must be constant or cosine");
        };

        auto& grid = (*t)["grid"];
        grid["dim_x"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.grid.dim_x = static_cast<int>(parse_int(v, w));
        };
        grid["n_x"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.grid.n_x = static_cast<int>(parse_int(v, w));
        };
        grid["length_x"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.grid.length_x = parse_double(v, w);
        };
        grid["n_z"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.grid.n_z = static_cast<int>(parse_int(v, w));
        };

        auto& step = (*t)["step"];
        step["dt"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.step.dt = parse_double(v, w);
        };
        step["t_end"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.step.t_end = parse_double(v, w);
        };
        step["cfl_safety"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.step.cfl_safety = parse_double(v, w);
        };
        step["positivity_tol"] = [](ExperimentConfig& c, const std::string& v,
                                    const std::string& w) {
            c.step.positivity_tol = parse_double(v, w);
        };
        step["snapshot_every"] = [](ExperimentConfig& c, const std::string& v,
                                    const std::string& w) {
            c.step.snapshot_every = static_cast<int>(parse_int(v, w));
        };
        step["freeze_h_n"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.step.freeze_h_n = parse_bool(v, w);
        };

        auto& init = (*t)["initial"];
        init["kind"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            if (v == "constant")
                c.initial.kind = InitialKind::Constant;
            else if (v == "gaussian-bump")
                c.initial.kind = InitialKind::GaussianBump;
            else if (v == "fourier-mode")
                c.initial.kind = InitialKind::FourierMode;
            else if (v == "random")
                c.initial.kind = InitialKind::Random;
            else if (v == "concentrated")
                c.initial.kind = InitialKind::Concentrated;
            else
                throw ConfigError(w +
                                  ": kind must be constant, gaussian-bump, fourier-mode, random "
                                  "or concentrated");
        };
        auto init_double = [](double InitialConfig::* member) {
            return [member](ExperimentConfig& c, const std::string& v, const std::string& w) {
                c.initial.*member = parse_double(v, w);
            };
        };
        init["rho0"] = init_double(&InitialConfig::rho0);
        init["h0"] = init_double(&InitialConfig::h0);
        init["n0"] = init_double(&InitialConfig::n0);
        init["amplitude"] = init_double(&InitialConfig::amplitude);
        init["sigma_x"] = init_double(&InitialConfig::sigma_x);
        init["sigma_z"] = init_double(&InitialConfig::sigma_z);
        init["x_center"] = init_double(&InitialConfig::x_center);
        init["z_center"] = init_double(&InitialConfig::z_center);
        init["mode"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.initial.mode = static_cast<int>(parse_int(v, w));
        };
        init["field"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            if (v == "rho")
                c.initial.field = FieldSelector::Rho;
            else if (v == "h")
                c.initial.field = FieldSelector::H;
            else if (v == "n")
                c.initial.field = FieldSelector::N;
            else
                throw ConfigError(w + ": field must be rho, h or n");
        };

        auto& diag = (*t)["diagnostics"];
        diag["energies"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.diagnostics.energies = parse_bool(v, w);
        };
        diag["mode_max"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.diagnostics.mode_max = static_cast<int>(parse_int(v, w));
        };
        diag["fit_window_start"] = [](ExperimentConfig& c, const std::string& v,
                                      const std::string& w) {
            c.diagnostics.fit_window_start = parse_double(v, w);
        };

        auto& output = (*t)["output"];
        output["dir"] = [](ExperimentConfig& c, const std::string& v, const std::string&) {
            c.output.dir = v;
        };
        output["write_snapshots"] = [](ExperimentConfig& c, const std::string& v,
                                       const std::string& w) {
            c.output.write_snapshots = parse_bool(v, w);
        };

        auto& sweep = (*t)["sweep"];
        sweep["parameter"] = [](ExperimentConfig& c, const std::string& v, const std::string&) {
            c.sweep.parameter = v;
        };
        sweep["values"] = [](ExperimentConfig& c, const std::string& v, const std::string& w) {
            c.sweep.values = parse_list(v, w);
        };
        return t;
    }();
    return *table;
}

std::string nearest_key(const std::map<std::string, Setter>& keys, const std::string& bad) {
    std::string best;
    int best_d = 4;  // only suggest close matches
    for (const auto& [k, _] : keys) {
        const int d = levenshtein(bad, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::string nearest_section(const std::string& bad) {
    std::string best;
    int best_d = 4;
    for (const auto& [k, _] : schema()) {
        const int d = levenshtein(bad, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace

PeriodicGrid ExperimentConfig::make_grid() const {
    PeriodicGrid g;
    g.dim_x = grid.dim_x;
    g.n_x = grid.n_x;
    g.length_x = grid.length_x;
    g.n_z = grid.n_z;
    g.Z_w = params.Z_w;
    return g;
}

void ExperimentConfig::validate() const {
    try {
        params.validate(model != ModelKind::KEecp);
        make_grid().validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("validation error: ") + e.what());
    }
    if (step.dt < 0.0) throw ConfigError("validation error: dt must be >= 0 (0 selects auto)");
    if (!(step.t_end >= 0.0)) throw ConfigError("validation error: t_end must be >= 0");
    if (!(step.cfl_safety > 0.0 && step.cfl_safety <= 1.0))
        throw ConfigError("validation error: cfl_safety must lie in (0, 1]");
    if (step.positivity_tol < 0.0)
        throw ConfigError("validation error: positivity_tol must be >= 0");
    if (step.snapshot_every < 1)
        throw ConfigError("validation error: snapshot_every must be >= 1");
    if (!(initial.sigma_x > 0.0) || !(initial.sigma_z > 0.0))
        throw ConfigError("validation error: sigma_x and sigma_z must be positive");
    if (initial.amplitude < 0.0)
        throw ConfigError("validation error: amplitude must be >= 0");
    if (initial.mode < 0) throw ConfigError("validation error: mode must be >= 0");
    if (diagnostics.mode_max < 0)
        throw ConfigError("validation error: mode_max must be >= 0");
    if (!(diagnostics.fit_window_start >= 0.0 && diagnostics.fit_window_start < 1.0))
        throw ConfigError("validation error: fit_window_start must lie in [0, 1)");
    if (!sweep.parameter.empty()) {
        if (sweep.values.empty())
            throw ConfigError("validation error: sweep values must be a non-empty list");
        for (double v : sweep.values) {
            ModelParams p = params;
            set_param_by_name(p, sweep.parameter, v);  // throws for unknown names
            ExperimentConfig sub = *this;
            sub.params = p;
            sub.sweep = {};
            sub.validate();
        }
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::vector<std::string> errors;
    std::set<std::string> seen;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::ostringstream loc;
        const std::size_t col = line.find_first_not_of(" \t") + 1;
        loc << "line " << lineno << ", column " << col;
        if (t.front() == '[') {
            if (t.back() != ']') {
                errors.push_back(loc.str() + ": unterminated section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            if (schema().find(section) == schema().end()) {
                std::string msg = loc.str() + ": unknown section [" + section + "]";
                const std::string near = nearest_section(section);
                if (!near.empty()) msg += "; nearest match [" + near + "]";
                errors.push_back(msg);
                section.clear();
            }
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back(loc.str() + ": expected key = value");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) {
            errors.push_back(loc.str() + ": key '" + key + "' outside any section");
            continue;
        }
        const auto& keys = schema().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) {
            std::string msg = loc.str() + ": unknown key '" + key + "' in [" + section + "]";
            const std::string near = nearest_key(keys, key);
            if (!near.empty()) msg += "; nearest match '" + near + "'";
            errors.push_back(msg);
            continue;
        }
        const std::string id = section + "." + key;
        if (!seen.insert(id).second) {
            errors.push_back(loc.str() + ": duplicate key '" + key + "' in [" + section + "]");
            continue;
        }
        try {
            it->second(config, value, loc.str());
        } catch (const ConfigError& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (i) joined += '\n';
            joined += errors[i];
        }
        throw ConfigError(joined);
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* initial_kind_name(InitialKind k) {
    switch (k) {
        case InitialKind::Constant: return "constant";
        case InitialKind::GaussianBump: return "gaussian-bump";
        case InitialKind::FourierMode: return "fourier-mode";
        case InitialKind::Random: return "random";
        case InitialKind::Concentrated: return "concentrated";
    }
    return "?";
}

const char* field_name(FieldSelector f) {
    switch (f) {
        case FieldSelector::Rho: return "rho";
        case FieldSelector::H: return "h";
        case FieldSelector::N: return "n";
    }
    return "?";
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::KEecp: return "k-eecp";
        case ModelKind::AdEecp: return "ad-eecp";
        case ModelKind::Science2011: return "science-2011";
    }
    return "?";
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[model]\n";
    os << "kind = " << model_kind_name(c.model) << "\n\n";
    os << "[params]\n";
    for (const auto& pk : kParamDoubles) os << pk.name << " = " << g17(c.params.*pk.member) << "\n";
    os << "sobolev_s = " << c.params.sobolev_s << "\n";
    os << "motility_profile = "
       << (c.params.motility_profile == MotilityProfile::Constant ? "constant" : "cosine")
       << "\n\n";
    os << "[grid]\n";
    os << "dim_x = " << c.grid.dim_x << "\n";
    os << "n_x = " << c.grid.n_x << "\n";
    os << "length_x = " << g17(c.grid.length_x) << "\n";
    os << "n_z = " << c.grid.n_z << "\n\n";
    os << "[step]\n";
    os << "dt = " << g17(c.step.dt) << "\n";
    os << "t_end = " << g17(c.step.t_end) << "\n";
    os << "cfl_safety = " << g17(c.step.cfl_safety) << "\n";
    os << "positivity_tol = " << g17(c.step.positivity_tol) << "\n";
    os << "snapshot_every = " << c.step.snapshot_every << "\n";
    os << "freeze_h_n = " << (c.step.freeze_h_n ? "true" : "false") << "\n\n";
    os << "[initial]\n";
    os << "kind = " << initial_kind_name(c.initial.kind) << "\n";
    os << "rho0 = " << g17(c.initial.rho0) << "\n";
    os << "h0 = " << g17(c.initial.h0) << "\n";
    os << "n0 = " << g17(c.initial.n0) << "\n";
    os << "amplitude = " << g17(c.initial.amplitude) << "\n";
    os << "mode = " << c.initial.mode << "\n";
    os << "field = " << field_name(c.initial.field) << "\n";
    os << "sigma_x = " << g17(c.initial.sigma_x) << "\n";
    os << "sigma_z = " << g17(c.initial.sigma_z) << "\n";
    os << "x_center = " << g17(c.initial.x_center) << "\n";
    os << "z_center = " << g17(c.initial.z_center) << "\n\n";
    os << "[diagnostics]\n";
    os << "energies = " << (c.diagnostics.energies ? "true" : "false") << "\n";
    os << "mode_max = " << c.diagnostics.mode_max << "\n";
    os << "fit_window_start = " << g17(c.diagnostics.fit_window_start) << "\n\n";
    os << "[output]\n";
    os << "dir = " << c.output.dir << "\n";
    os << "write_snapshots = " << (c.output.write_snapshots ? "true" : "false") << "\n";
    if (!c.sweep.parameter.empty()) {
        os << "\n[sweep]\n";
        os << "parameter = " << c.sweep.parameter << "\n";
        os << "values = ";
        for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
            os << (i ? ", " : "") << g17(c.sweep.values[i]);
        os << "\n";
    }
    return os.str();
}

void set_param_by_name(ModelParams& params, const std::string& name, double value) {
    for (const auto& pk : kParamDoubles) {
        if (name == pk.name) {
            params.*pk.member = value;
            return;
        }
    }
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

}  // namespace stripelab
