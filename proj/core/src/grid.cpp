#include "vpflow/grid.hpp"

#include <cmath>
#include <string>

#include "vpflow/errors.hpp"

namespace vpflow {

StaggeredGrid make_grid(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw ConfigError("grid dimensions must be positive, got lx=" + std::to_string(lx) +
                          " ly=" + std::to_string(ly));
    }
    if (nx < 2 || ny < 2) {
        throw ConfigError("grid needs at least 2 cells per direction, got nx=" +
                          std::to_string(nx) + " ny=" + std::to_string(ny));
    }
    StaggeredGrid g;
    g.lx = lx;
    g.ly = ly;
    g.nx = nx;
    g.ny = ny;
    g.dx = lx / nx;
    g.dy = ly / ny;
    return g;
}

namespace {

bool vec_all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double vec_max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

bool ScalarField::all_finite() const { return vec_all_finite(values_); }
double ScalarField::max_abs() const { return vec_max_abs(values_); }

bool VelocityField::all_finite() const { return vec_all_finite(u_) && vec_all_finite(v_); }
double VelocityField::max_abs() const { return std::max(vec_max_abs(u_), vec_max_abs(v_)); }

std::pair<ScalarField, ScalarField> interpolate_velocity_to_centers(const VelocityField& vel) {
    const StaggeredGrid& g = vel.grid();
    ScalarField uc(g);
    ScalarField vc(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            uc(i, j) = 0.5 * (vel.u(i, j) + vel.u(i + 1, j));
            vc(i, j) = 0.5 * (vel.v(i, j) + vel.v(i, j + 1));
        }
    }
    return {std::move(uc), std::move(vc)};
}

}  // namespace vpflow
