#include "stripelab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "stripelab/errors.hpp"

namespace stripelab {

namespace {

void write_header(std::ostream& os, const PeriodicGrid& g, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << "# stripe-lab snapshot v1; dim_x=" << g.dim_x << "; n_x=" << g.n_x
       << "; n_z=" << g.n_z << "; t=" << buf << '\n';
}

void write_values(std::ostream& os, const std::vector<double>& v) {
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        os << buf << ((i + 1) % 8 == 0 || i + 1 == v.size() ? '\n' : ' ');
    }
}

struct Header {
    int dim_x = 0, n_x = 0, n_z = 0;
    double t = 0.0;
};

Header parse_header(const std::string& line, const std::string& path) {
    Header h;
    if (std::sscanf(line.c_str(), "# stripe-lab snapshot v1; dim_x=%d; n_x=%d; n_z=%d; t=%lf",
                    &h.dim_x, &h.n_x, &h.n_z, &h.t) != 4)
        throw IoError(path + ": not a stripe-lab v1 snapshot");
    return h;
}

std::vector<double> read_numbers(std::istream& is, std::size_t count, const std::string& path) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        if (!(is >> v[i])) throw IoError(path + ": truncated snapshot data");
    return v;
}

Header open_and_check(std::ifstream& is, const std::string& path, const PeriodicGrid& grid) {
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    const Header h = parse_header(line, path);
    if (h.dim_x != grid.dim_x || h.n_x != grid.n_x || h.n_z != grid.n_z)
        throw IoError(path + ": snapshot grid does not match the expected grid");
    return h;
}

}  // namespace

void write_snapshot(const std::string& path, const KineticState& state) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_header(os, state.rho.grid(), state.t);
    write_values(os, state.rho.values());
    write_values(os, state.h.values());
    write_values(os, state.n.values());
}

void write_snapshot(const std::string& path, const MacroState& state) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_header(os, state.rho.grid(), state.t);
    write_values(os, state.rho.values());
    write_values(os, state.h.values());
    write_values(os, state.n.values());
}

KineticState read_kinetic_snapshot(const std::string& path, const PeriodicGrid& grid) {
    std::ifstream is(path);
    const Header h = open_and_check(is, path, grid);
    KineticState s;
    s.t = h.t;
    s.rho = KineticField(grid);
    s.h = ScalarField(grid);
    s.n = ScalarField(grid);
    s.rho.values() = read_numbers(is, s.rho.values().size(), path);
    s.h.values() = read_numbers(is, s.h.values().size(), path);
    s.n.values() = read_numbers(is, s.n.values().size(), path);
    return s;
}

MacroState read_macro_snapshot(const std::string& path, const PeriodicGrid& grid) {
    std::ifstream is(path);
    const Header h = open_and_check(is, path, grid);
    MacroState s;
    s.t = h.t;
    s.rho = ScalarField(grid);
    s.h = ScalarField(grid);
    s.n = ScalarField(grid);
    s.rho.values() = read_numbers(is, s.rho.values().size(), path);
    s.h.values() = read_numbers(is, s.h.values().size(), path);
    s.n.values() = read_numbers(is, s.n.values().size(), path);
    return s;
}

}  // namespace stripelab
