#include "vpflow/operators.hpp"

#include <algorithm>
#include <cmath>

namespace vpflow {

ScalarField divergence(const VelocityField& vel) {
    const StaggeredGrid& g = vel.grid();
    ScalarField div(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            div(i, j) = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx +
                        (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
        }
    }
    return div;
}

VelocityField pressure_gradient(const ScalarField& p) {
    const StaggeredGrid& g = p.grid();
    VelocityField grad(g);
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            grad.u(i, j) = (p(i, j) - p(i - 1, j)) / g.dx;
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) {
            grad.v(i, j) = (p(i, j) - p(i, j - 1)) / g.dy;
        }
    }
    return grad;
}

std::vector<double> shear_rate_corners(const VelocityField& vel, bool noslip_boundaries) {
    const StaggeredGrid& g = vel.grid();
    const int ncy = g.ny + 1;
    std::vector<double> d12(static_cast<std::size_t>(g.nx + 1) * ncy, 0.0);
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            double du_dy;
            if (j == 0) {
                du_dy = noslip_boundaries ? 2.0 * vel.u(i, 0) / g.dy
                                          : (vel.u(i, 1) - vel.u(i, 0)) / g.dy;
            } else if (j == g.ny) {
                du_dy = noslip_boundaries
                            ? -2.0 * vel.u(i, g.ny - 1) / g.dy
                            : (vel.u(i, g.ny - 1) - vel.u(i, g.ny - 2)) / g.dy;
            } else {
                du_dy = (vel.u(i, j) - vel.u(i, j - 1)) / g.dy;
            }
            double dv_dx;
            if (i == 0) {
                dv_dx = noslip_boundaries ? 2.0 * vel.v(0, j) / g.dx
                                          : (vel.v(1, j) - vel.v(0, j)) / g.dx;
            } else if (i == g.nx) {
                // Outlet: zero normal derivative of v (zero extra shear).
                dv_dx = noslip_boundaries
                            ? 0.0
                            : (vel.v(g.nx - 1, j) - vel.v(g.nx - 2, j)) / g.dx;
            } else {
                dv_dx = (vel.v(i, j) - vel.v(i - 1, j)) / g.dx;
            }
            d12[static_cast<std::size_t>(i) * ncy + j] = 0.5 * (du_dy + dv_dx);
        }
    }
    return d12;
}

VelocityField stress_divergence(const VelocityField& vel, const ScalarField& nu) {
    const StaggeredGrid& g = vel.grid();
    const int ncy = g.ny + 1;

    // Normal strain components at cell centers.
    ScalarField d11(g), d22(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            d11(i, j) = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx;
            d22(i, j) = (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
        }
    }

    // Shear flux nu*D12 at corners (harmonically averaged viscosity).
    std::vector<double> shear = shear_rate_corners(vel, /*noslip_boundaries=*/true);
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            shear[static_cast<std::size_t>(i) * ncy + j] *= corner_viscosity(nu, i, j);
        }
    }
    auto sh = [&](int i, int j) { return shear[static_cast<std::size_t>(i) * ncy + j]; };

    VelocityField out(g);
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            out.u(i, j) = (nu(i, j) * d11(i, j) - nu(i - 1, j) * d11(i - 1, j)) / g.dx +
                          (sh(i, j + 1) - sh(i, j)) / g.dy;
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) {
            out.v(i, j) = (sh(i + 1, j) - sh(i, j)) / g.dx +
                          (nu(i, j) * d22(i, j) - nu(i, j - 1) * d22(i, j - 1)) / g.dy;
        }
    }
    return out;
}

namespace {

struct UpwindZone {
    bool active = false;
    double x0 = 0.0, x1 = 0.0, y1 = 0.0;  // obstacle bounding box grown by one cell

    bool contains(double x, double y) const {
        return active && x >= x0 && x <= x1 && y <= y1;
    }
};

}  // namespace

VelocityField convection(const VelocityField& vel, const ObstacleShape* upwind_near) {
    const StaggeredGrid& g = vel.grid();
    UpwindZone zone;
    if (upwind_near && upwind_near->kind != ObstacleShape::Kind::None) {
        upwind_near->bounding_box(zone.x0, zone.x1, zone.y1);
        zone.x0 -= g.dx;
        zone.x1 += g.dx;
        zone.y1 += g.dy;
        zone.active = true;
    }

    VelocityField out(g);

    // u-component nodes (i in 1..nx-1, all j rows).
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double uu = vel.u(i, j);
            const double vv = 0.25 * (vel.v(i - 1, j) + vel.v(i, j) +
                                      vel.v(i - 1, j + 1) + vel.v(i, j + 1));
            const bool near_bnd = i <= 1 || i >= g.nx - 1 || j <= 0 || j >= g.ny - 1 ||
                                  zone.contains(g.x_face(i), g.y_center(j));

            double du_dx;
            if (!near_bnd) {
                du_dx = (vel.u(i + 1, j) - vel.u(i - 1, j)) / (2.0 * g.dx);
            } else if (uu >= 0.0) {
                du_dx = (vel.u(i, j) - vel.u(i - 1, j)) / g.dx;
            } else {
                du_dx = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx;
            }

            double du_dy;
            if (!near_bnd) {
                du_dy = (vel.u(i, j + 1) - vel.u(i, j - 1)) / (2.0 * g.dy);
            } else if (j == 0) {
                du_dy = (vel.u(i, 1) - vel.u(i, 0)) / g.dy;
            } else if (j == g.ny - 1) {
                du_dy = (vel.u(i, g.ny - 1) - vel.u(i, g.ny - 2)) / g.dy;
            } else if (vv >= 0.0) {
                du_dy = (vel.u(i, j) - vel.u(i, j - 1)) / g.dy;
            } else {
                du_dy = (vel.u(i, j + 1) - vel.u(i, j)) / g.dy;
            }

            out.u(i, j) = uu * du_dx + vv * du_dy;
        }
    }

    // v-component nodes (all i columns, j in 1..ny-1).
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) {
            const double vv = vel.v(i, j);
            const double uu = 0.25 * (vel.u(i, j - 1) + vel.u(i + 1, j - 1) +
                                      vel.u(i, j) + vel.u(i + 1, j));
            const bool near_bnd = i <= 0 || i >= g.nx - 1 || j <= 1 || j >= g.ny - 1 ||
                                  zone.contains(g.x_center(i), g.y_face(j));

            double dv_dx;
            if (!near_bnd) {
                dv_dx = (vel.v(i + 1, j) - vel.v(i - 1, j)) / (2.0 * g.dx);
            } else if (i == 0) {
                dv_dx = (vel.v(1, j) - vel.v(0, j)) / g.dx;
            } else if (i == g.nx - 1) {
                dv_dx = (vel.v(g.nx - 1, j) - vel.v(g.nx - 2, j)) / g.dx;
            } else if (uu >= 0.0) {
                dv_dx = (vel.v(i, j) - vel.v(i - 1, j)) / g.dx;
            } else {
                dv_dx = (vel.v(i + 1, j) - vel.v(i, j)) / g.dx;
            }

            double dv_dy;
            if (!near_bnd) {
                dv_dy = (vel.v(i, j + 1) - vel.v(i, j - 1)) / (2.0 * g.dy);
            } else if (vv >= 0.0) {
                dv_dy = (vel.v(i, j) - vel.v(i, j - 1)) / g.dy;
            } else {
                dv_dy = (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
            }

            out.v(i, j) = uu * dv_dx + vv * dv_dy;
        }
    }

    return out;
}

ScalarField strain_norm_sq(const VelocityField& vel) {
    const StaggeredGrid& g = vel.grid();
    const int ncy = g.ny + 1;
    std::vector<double> d12 = shear_rate_corners(vel, /*noslip_boundaries=*/false);
    auto sh = [&](int i, int j) { return d12[static_cast<std::size_t>(i) * ncy + j]; };

    ScalarField out(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double d11 = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx;
            const double d22 = (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
            const double d12c = 0.25 * (sh(i, j) + sh(i + 1, j) + sh(i, j + 1) +
                                        sh(i + 1, j + 1));
            out(i, j) = d11 * d11 + d22 * d22 + 2.0 * d12c * d12c;
        }
    }
    return out;
}

ScalarField strain_norm_sq(const VelocityField& vel, const ScalarField& nu) {
    const StaggeredGrid& g = vel.grid();
    const int ncy = g.ny + 1;
    std::vector<double> d12 = shear_rate_corners(vel, /*noslip_boundaries=*/false);
    std::vector<double> cnu(d12.size());
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            cnu[static_cast<std::size_t>(i) * ncy + j] = corner_viscosity(nu, i, j);
        }
    }
    auto sh = [&](int i, int j) {
        const std::size_t k = static_cast<std::size_t>(i) * ncy + j;
        return cnu[k] * d12[k];
    };

    ScalarField out(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double d11 = (vel.u(i + 1, j) - vel.u(i, j)) / g.dx;
            const double d22 = (vel.v(i, j + 1) - vel.v(i, j)) / g.dy;
            // One-sided strain per corner: stress-continuous rescaling by
            // corner_viscosity / cell viscosity.
            const double d12c = 0.25 *
                                (sh(i, j) + sh(i + 1, j) + sh(i, j + 1) +
                                 sh(i + 1, j + 1)) /
                                nu(i, j);
            out(i, j) = d11 * d11 + d22 * d22 + 2.0 * d12c * d12c;
        }
    }
    return out;
}

}  // namespace vpflow
