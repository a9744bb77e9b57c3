#include "vpflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vpflow/errors.hpp"
#include "vpflow/operators.hpp"

namespace vpflow {

namespace {

// Velocity-gradient components: du/dx, dv/dy at cell centers; du/dy, dv/dx
// at corners, one-sided at boundary rows (no wall condition assumed).
struct GradientSamples {
    ScalarField du_dx, dv_dy;
    std::vector<double> du_dy, dv_dx;  // (nx+1) x (ny+1), index i*(ny+1)+j
};

GradientSamples gradient_samples(const VelocityField& vel) {
    const StaggeredGrid& g = vel.grid();
    GradientSamples s{ScalarField(g), ScalarField(g), {}, {}};
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            s.du_dx(i, j) = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx;
            s.dv_dy(i, j) = (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
        }
    }
    const int ncy = g.ny + 1;
    s.du_dy.resize(static_cast<std::size_t>(g.nx + 1) * ncy);
    s.dv_dx.resize(s.du_dy.size());
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * ncy + j;
            if (j == 0) {
                s.du_dy[k] = (vel.u(i, 1) - vel.u(i, 0)) / g.dy;
            } else if (j == g.ny) {
                s.du_dy[k] = (vel.u(i, g.ny - 1) - vel.u(i, g.ny - 2)) / g.dy;
            } else {
                s.du_dy[k] = (vel.u(i, j) - vel.u(i, j - 1)) / g.dy;
            }
            if (i == 0) {
                s.dv_dx[k] = (vel.v(1, j) - vel.v(0, j)) / g.dx;
            } else if (i == g.nx) {
                s.dv_dx[k] = (vel.v(g.nx - 1, j) - vel.v(g.nx - 2, j)) / g.dx;
            } else {
                s.dv_dx[k] = (vel.v(i, j) - vel.v(i - 1, j)) / g.dx;
            }
        }
    }
    return s;
}

}  // namespace

double deformation_energy_in_S(const VelocityField& vel, const ObstacleShape& shape,
                               bool* warned, const ScalarField* nu) {
    if (warned) *warned = false;
    if (shape.kind == ObstacleShape::Kind::None) {
        if (warned) *warned = true;
        return 0.0;
    }
    const StaggeredGrid& g = vel.grid();
    const ScalarField sq = nu ? strain_norm_sq(vel, *nu) : strain_norm_sq(vel);
    double sum = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            if (inside(shape, g.x_center(i), g.y_center(j))) sum += sq(i, j);
        }
    }
    return sum * g.cell_area();
}

double total_dissipation(const VelocityField& vel, const ScalarField& nu) {
    const StaggeredGrid& g = vel.grid();
    const ScalarField sq = strain_norm_sq(vel, nu);
    double sum = 0.0;
    for (std::size_t k = 0; k < sq.data().size(); ++k) {
        sum += nu.data()[k] * sq.data()[k];
    }
    return sum * g.cell_area();
}

double max_gradient(const VelocityField& vel) {
    const GradientSamples s = gradient_samples(vel);
    double m = 0.0;
    for (double x : s.du_dx.data()) m = std::max(m, std::abs(x));
    for (double x : s.dv_dy.data()) m = std::max(m, std::abs(x));
    for (double x : s.du_dy) m = std::max(m, std::abs(x));
    for (double x : s.dv_dx) m = std::max(m, std::abs(x));
    return m;
}

double gradient_l2(const VelocityField& vel) {
    const StaggeredGrid& g = vel.grid();
    const GradientSamples s = gradient_samples(vel);
    const int ncy = g.ny + 1;
    auto corner_sq_avg = [&](const std::vector<double>& c, int i, int j) {
        auto at = [&](int ii, int jj) {
            const double v = c[static_cast<std::size_t>(ii) * ncy + jj];
            return v * v;
        };
        return 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1));
    };
    double sum = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            sum += s.du_dx(i, j) * s.du_dx(i, j) + s.dv_dy(i, j) * s.dv_dy(i, j) +
                   corner_sq_avg(s.du_dy, i, j) + corner_sq_avg(s.dv_dx, i, j);
        }
    }
    return std::sqrt(sum * g.cell_area());
}

ProfileRecord extract_profile(const VelocityField& vel, double x_station) {
    const StaggeredGrid& g = vel.grid();
    if (!(x_station > 0.0) || !(x_station < g.lx)) {
        throw ConfigError("profile station must lie strictly inside (0, lx)");
    }
    const int i = std::min(g.nx - 1, static_cast<int>(x_station / g.dx));
    ProfileRecord rec;
    rec.x_station = x_station;
    rec.y.reserve(g.ny);
    rec.magnitude.reserve(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        const double uc = 0.5 * (vel.u(i, j) + vel.u(i + 1, j));
        const double vc = 0.5 * (vel.v(i, j) + vel.v(i, j + 1));
        rec.y.push_back(g.y_center(j));
        rec.magnitude.push_back(std::hypot(uc, vc));
    }
    return rec;
}

ProfileDiff profile_difference(const ProfileRecord& a, const ProfileRecord& b) {
    if (a.magnitude.size() != b.magnitude.size()) {
        throw ConfigError("profile sample counts differ");
    }
    if (a.x_station != b.x_station) {
        throw ConfigError("profiles were taken at different stations");
    }
    const std::size_t n = a.magnitude.size();
    const double dy = n > 1 ? a.y[1] - a.y[0] : 1.0;
    ProfileDiff d;
    double sum = 0.0, bsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = a.magnitude[k] - b.magnitude[k];
        sum += e * e;
        bsum += b.magnitude[k] * b.magnitude[k];
        d.linf = std::max(d.linf, std::abs(e));
    }
    d.l2 = std::sqrt(sum * dy);
    const double bnorm = std::sqrt(bsum * dy);
    d.relative_l2 = bnorm > 0.0 ? d.l2 / bnorm : (d.l2 > 0.0 ? 1.0 : 0.0);
    return d;
}

DiagnosticsRecord collect(const VelocityField& vel, const ScalarField& p,
                          const SimConfig& config) {
    (void)p;
    const StaggeredGrid g = vel.grid();
    DiagnosticsRecord rec;
    rec.m = config.viscosity.m;

    ScalarField nu;
    if (config.mode == Mode::Rigid) {
        nu = ScalarField(g);
        for (double& x : nu.data()) x = config.viscosity.nu_fluid;
    } else {
        nu = build_viscosity_field(g, config.shape, config.viscosity);
    }
    rec.deformation_in_S = deformation_energy_in_S(vel, config.shape, &rec.shape_warning, &nu);
    rec.total_dissipation = total_dissipation(vel, nu);
    rec.grad_max = max_gradient(vel);
    rec.grad_l2 = gradient_l2(vel);
    rec.div_max = divergence(vel).max_abs();
    rec.profile = extract_profile(vel, config.profile_station);
    return rec;
}

}  // namespace vpflow
