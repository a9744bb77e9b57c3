#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "vpflow/harness.hpp"

namespace vpflow {

namespace {

void write_scalar(std::ofstream& out, const char* name, const ScalarField& f) {
    const StaggeredGrid& g = f.grid();
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    char buf[40];
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g\n", f(i, j));
            out << buf;
        }
    }
}

}  // namespace

void write_vtk(const VelocityField& vel, const ScalarField& p, const ScalarField& nu,
               const ScalarField& mask, const std::string& path) {
    const StaggeredGrid& g = vel.grid();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");

    auto [uc, vc] = interpolate_velocity_to_centers(vel);
    ScalarField mag(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            mag(i, j) = std::hypot(uc(i, j), vc(i, j));
        }
    }

    out << "# vtk DataFile Version 3.0\n";
    out << "channel flow fields\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.nx << " " << g.ny << " 1\n";
    out << "ORIGIN " << 0.5 * g.dx << " " << 0.5 * g.dy << " 0\n";
    out << "SPACING " << g.dx << " " << g.dy << " 1\n";
    out << "POINT_DATA " << static_cast<long>(g.nx) * g.ny << "\n";
    write_scalar(out, "velocity_magnitude", mag);
    write_scalar(out, "pressure", p);
    write_scalar(out, "viscosity", nu);
    write_scalar(out, "obstacle", mask);
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace vpflow
