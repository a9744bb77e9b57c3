#include "vpflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "vpflow/errors.hpp"

namespace vpflow {

void SimConfig::validate() const {
    const StaggeredGrid g = make_grid(lx, ly, nx, ny);  // validates grid inputs
    shape.validate(g);
    viscosity.validate();
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0) {
        throw ConfigError("cfl_safety must lie in (0, 1]");
    }
    if (dt < 0.0) throw ConfigError("dt must be non-negative (0 selects automatic)");
    if (steady_tol < 0.0) throw ConfigError("steady_tol must be non-negative");
    if (max_steps <= 0) throw ConfigError("max_steps must be positive");
    if (!(poisson_tol > 0.0) || poisson_tol >= 1.0) {
        throw ConfigError("poisson_tol must lie in (0, 1)");
    }
    if (poisson_max_iters <= 0) throw ConfigError("poisson_max_iters must be positive");
    if (u_max < 0.0) throw ConfigError("u_max must be non-negative");
    if (!(profile_station > 0.0) || !(profile_station < lx)) {
        throw ConfigError("profile_station must lie strictly inside (0, lx)");
    }
}

double SimConfig::velocity_scale() const {
    const double f = std::hypot(body_force[0], body_force[1]);
    return std::max(u_max, f * ly * ly / viscosity.nu_fluid);
}

double SimConfig::effective_steady_tol() const {
    if (steady_tol > 0.0) return steady_tol;
    const double s = velocity_scale();
    return 1e-6 * (s > 0.0 ? s : 1.0) / ly;
}

double SimConfig::nu_max() const {
    if (mode == Mode::Rigid || shape.kind == ObstacleShape::Kind::None) {
        return viscosity.nu_fluid;
    }
    return std::max(viscosity.nu_fluid, viscosity.m);
}

bool SimConfig::implicit_viscous_active() const {
    switch (implicit_viscous) {
        case ImplicitViscous::On:
            return true;
        case ImplicitViscous::Off:
            return false;
        case ImplicitViscous::Auto:
            break;
    }
    const double u = velocity_scale();
    if (u <= 0.0) return false;
    const StaggeredGrid g = grid();
    const double h = std::min(g.dx, g.dy);
    return 0.25 * h * h / nu_max() < g.dx / u;
}

double stable_dt(const SimConfig& config, double nu_max) {
    const StaggeredGrid g = config.grid();
    const double u = config.velocity_scale();
    const double conv = u > 0.0 ? g.dx / u : std::numeric_limits<double>::infinity();
    const double h = std::min(g.dx, g.dy);
    const double visc = 0.25 * h * h / nu_max;
    return config.cfl_safety * std::min(conv, visc);
}

void apply_boundary_conditions(VelocityField& vel, const SimConfig& config,
                               double inlet_scale, const ScalarField* mask) {
    const StaggeredGrid& g = vel.grid();
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y_center(j);
        vel.u(0, j) = inlet_scale * config.u_max * 4.0 * y * (config.ly - y) /
                      (config.ly * config.ly);
        vel.u(g.nx, j) = vel.u(g.nx - 1, j);
    }
    for (int i = 0; i < g.nx; ++i) {
        vel.v(i, 0) = 0.0;
        vel.v(i, g.ny) = 0.0;
    }
    if (config.mode == Mode::Rigid && mask) {
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                if ((*mask)(i, j) > 0.5) {
                    vel.u(i, j) = 0.0;
                    vel.u(i + 1, j) = 0.0;
                    vel.v(i, j) = 0.0;
                    vel.v(i, j + 1) = 0.0;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Pressure Poisson solve
// ---------------------------------------------------------------------------

ScalarField poisson_operator(const ScalarField& phi) {
    const StaggeredGrid& g = phi.grid();
    ScalarField out(g);
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            double lap = 0.0;
            if (i > 0) lap += (phi(i - 1, j) - phi(i, j)) * idx2;
            if (i < g.nx - 1) {
                lap += (phi(i + 1, j) - phi(i, j)) * idx2;
            } else {
                lap += -2.0 * phi(i, j) * idx2;  // Dirichlet phi=0 on the outlet face
            }
            if (j > 0) lap += (phi(i, j - 1) - phi(i, j)) * idy2;
            if (j < g.ny - 1) lap += (phi(i, j + 1) - phi(i, j)) * idy2;
            out(i, j) = lap;
        }
    }
    return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

ScalarField pressure_poisson(const ScalarField& rhs, double tol, int max_iters,
                             int* iters_out, double* residual_out) {
    const StaggeredGrid& g = rhs.grid();
    const int nx = g.nx, ny = g.ny;
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);

    // A = -Laplacian (SPD with the outlet Dirichlet gauge); solve A phi = -rhs.
    auto applyA = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * ny + j;
                double a = 0.0;
                if (i > 0) a += (x[k] - x[k - ny]) * idx2;
                if (i < nx - 1) {
                    a += (x[k] - x[k + ny]) * idx2;
                } else {
                    a += 2.0 * x[k] * idx2;
                }
                if (j > 0) a += (x[k] - x[k - 1]) * idy2;
                if (j < ny - 1) a += (x[k] - x[k + 1]) * idy2;
                out[k] = a;
            }
        }
    };

    std::vector<double> diag(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double d = 0.0;
            if (i > 0) d += idx2;
            d += (i < nx - 1) ? idx2 : 2.0 * idx2;
            if (j > 0) d += idy2;
            if (j < ny - 1) d += idy2;
            diag[static_cast<std::size_t>(i) * ny + j] = d;
        }
    }

    const std::size_t n = diag.size();
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = -rhs.data()[k];

    ScalarField phi(g);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        if (iters_out) *iters_out = 0;
        if (residual_out) *residual_out = 0.0;
        return phi;
    }

    std::vector<double> x(n, 0.0), r = b, z(n), p(n), ap(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
    p = z;
    double rz = dot(r, z);
    double rnorm = bnorm;
    int it = 0;
    for (; it < max_iters; ++it) {
        rnorm = norm2(r);
        if (rnorm <= tol * bnorm) break;
        applyA(p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::size_t k = 0; k < n; ++k) x[k] += alpha * p[k];
        for (std::size_t k = 0; k < n; ++k) r[k] -= alpha * ap[k];
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    if (iters_out) *iters_out = it;
    if (residual_out) *residual_out = rnorm / bnorm;
    if (rnorm > tol * bnorm) {
        throw NonConvergence("pressure Poisson solve", it, rnorm / bnorm);
    }
    phi.data() = std::move(x);
    return phi;
}

// ---------------------------------------------------------------------------
// Implicit viscous solve
// ---------------------------------------------------------------------------

namespace {

/// Matrix-free application of the conservative stress operator with corner
/// viscosities precomputed once per solve.
class ViscousOperator {
public:
    ViscousOperator(const StaggeredGrid& g, const ScalarField& nu) : g_(g), nu_(&nu) {
        corner_.resize(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
        for (int i = 0; i <= g.nx; ++i) {
            for (int j = 0; j <= g.ny; ++j) {
                corner_[cidx(i, j)] = corner_viscosity(nu, i, j);
            }
        }
        shear_.resize(corner_.size());
    }

    // out = stress_divergence(in, nu); boundary faces of out are zeroed.
    void apply(const VelocityField& in, VelocityField& out) {
        const StaggeredGrid& g = g_;
        const ScalarField& nu = *nu_;
        const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;

        for (int i = 0; i <= g.nx; ++i) {
            for (int j = 0; j <= g.ny; ++j) {
                double du_dy;
                if (j == 0) {
                    du_dy = 2.0 * in.u(i, 0) * idy;
                } else if (j == g.ny) {
                    du_dy = -2.0 * in.u(i, g.ny - 1) * idy;
                } else {
                    du_dy = (in.u(i, j) - in.u(i, j - 1)) * idy;
                }
                double dv_dx;
                if (i == 0) {
                    dv_dx = 2.0 * in.v(0, j) * idx;
                } else if (i == g.nx) {
                    dv_dx = 0.0;
                } else {
                    dv_dx = (in.v(i, j) - in.v(i - 1, j)) * idx;
                }
                shear_[cidx(i, j)] = corner_[cidx(i, j)] * 0.5 * (du_dy + dv_dx);
            }
        }

        for (int j = 0; j < g.ny; ++j) {
            out.u(0, j) = 0.0;
            out.u(g.nx, j) = 0.0;
        }
        for (int i = 0; i < g.nx; ++i) {
            out.v(i, 0) = 0.0;
            out.v(i, g.ny) = 0.0;
        }
        for (int i = 1; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                const double d11e = (in.u(i + 1, j) - in.u(i, j)) * idx;
                const double d11w = (in.u(i, j) - in.u(i - 1, j)) * idx;
                out.u(i, j) = (nu(i, j) * d11e - nu(i - 1, j) * d11w) * idx +
                              (shear_[cidx(i, j + 1)] - shear_[cidx(i, j)]) * idy;
            }
        }
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 1; j < g.ny; ++j) {
                const double d22n = (in.v(i, j + 1) - in.v(i, j)) * idy;
                const double d22s = (in.v(i, j) - in.v(i, j - 1)) * idy;
                out.v(i, j) = (shear_[cidx(i + 1, j)] - shear_[cidx(i, j)]) * idx +
                              (nu(i, j) * d22n - nu(i, j - 1) * d22s) * idy;
            }
        }
    }

    // Diagonal entries of the stress operator (they are negative).
    double diag_u(int i, int j) const {
        const StaggeredGrid& g = g_;
        const ScalarField& nu = *nu_;
        const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
        const double cs = (j == 0) ? corner_[cidx(i, 0)] * idy2
                                   : corner_[cidx(i, j)] * 0.5 * idy2;
        const double cn = (j == g.ny - 1) ? corner_[cidx(i, g.ny)] * idy2
                                          : corner_[cidx(i, j + 1)] * 0.5 * idy2;
        return -((nu(i, j) + nu(i - 1, j)) * idx2 + cs + cn);
    }
    double diag_v(int i, int j) const {
        const StaggeredGrid& g = g_;
        const ScalarField& nu = *nu_;
        const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
        const double cw = (i == 0) ? corner_[cidx(0, j)] * idx2
                                   : corner_[cidx(i, j)] * 0.5 * idx2;
        const double ce = (i == g.nx - 1) ? 0.0 : corner_[cidx(i + 1, j)] * 0.5 * idx2;
        return -((nu(i, j) + nu(i, j - 1)) * idy2 + cw + ce);
    }

    double corner(int i, int j) const { return corner_[cidx(i, j)]; }

private:
    std::size_t cidx(int i, int j) const {
        return static_cast<std::size_t>(i) * (g_.ny + 1) + j;
    }

    StaggeredGrid g_;
    const ScalarField* nu_;
    std::vector<double> corner_;
    std::vector<double> shear_;
};

void zero_boundary_faces(VelocityField& f) {
    const StaggeredGrid& g = f.grid();
    for (int j = 0; j < g.ny; ++j) {
        f.u(0, j) = 0.0;
        f.u(g.nx, j) = 0.0;
    }
    for (int i = 0; i < g.nx; ++i) {
        f.v(i, 0) = 0.0;
        f.v(i, g.ny) = 0.0;
    }
}

double vdot(const VelocityField& a, const VelocityField& b) {
    return dot(a.u_data(), b.u_data()) + dot(a.v_data(), b.v_data());
}

/// grad(w * div(in)) on the interior faces; boundary faces are zero.
VelocityField weighted_grad_div(const VelocityField& in, const ScalarField& w) {
    ScalarField d = divergence(in);
    for (std::size_t k = 0; k < d.data().size(); ++k) d.data()[k] *= w.data()[k];
    return pressure_gradient(d);
}

/// Weight of the grad-div augmentation: the viscosity field with the outlet
/// column zeroed. The outlet face is a copy refreshed outside the implicit
/// solve, so any augmentation touching it is mismatched and feeds back with
/// gain ~ nu*dt/h^2; dropping the last column keeps the pair matched.
ScalarField augmentation_weight(const ScalarField& nu) {
    ScalarField w = nu;
    const StaggeredGrid& g = w.grid();
    for (int i = std::max(0, g.nx - 3); i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) w(i, j) = 0.0;
    }
    return w;
}

/// Solves (I - dt*S - dt*G) x = vel over the interior faces, where S is the
/// stress operator and G (optional) is the grad-div augmentation
/// G u = grad(gd_w * div u). Boundary faces are held at their incoming values.
VelocityField viscous_solve(const VelocityField& vel, const ScalarField& nu,
                            const ScalarField* gd_w, double dt, double tol,
                            int max_iters, int* iters_out) {
    const StaggeredGrid& g = vel.grid();
    ViscousOperator S(g, nu);

    // Split off the fixed boundary faces: solution = ug + y, y interior-supported.
    VelocityField ug(g);
    for (int j = 0; j < g.ny; ++j) {
        ug.u(0, j) = vel.u(0, j);
        ug.u(g.nx, j) = vel.u(g.nx, j);
    }
    for (int i = 0; i < g.nx; ++i) {
        ug.v(i, 0) = vel.v(i, 0);
        ug.v(i, g.ny) = vel.v(i, g.ny);
    }

    VelocityField tmp(g);
    S.apply(ug, tmp);
    if (gd_w) {
        const VelocityField gg = weighted_grad_div(ug, *gd_w);
        for (std::size_t k = 0; k < tmp.u_data().size(); ++k) {
            tmp.u_data()[k] += gg.u_data()[k];
        }
        for (std::size_t k = 0; k < tmp.v_data().size(); ++k) {
            tmp.v_data()[k] += gg.v_data()[k];
        }
        zero_boundary_faces(tmp);
    }
    VelocityField rhs = vel;
    zero_boundary_faces(rhs);
    for (std::size_t k = 0; k < rhs.u_data().size(); ++k) {
        rhs.u_data()[k] += dt * tmp.u_data()[k];
    }
    for (std::size_t k = 0; k < rhs.v_data().size(); ++k) {
        rhs.v_data()[k] += dt * tmp.v_data()[k];
    }

    // Jacobi preconditioner of A = I - dt*S - dt*G.
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
    VelocityField diag(g);
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            diag.u(i, j) = 1.0 - dt * S.diag_u(i, j);
            if (gd_w) {
                diag.u(i, j) += dt * ((*gd_w)(i, j) + (*gd_w)(i - 1, j)) * idx2;
            }
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) {
            diag.v(i, j) = 1.0 - dt * S.diag_v(i, j);
            if (gd_w) {
                diag.v(i, j) += dt * ((*gd_w)(i, j) + (*gd_w)(i, j - 1)) * idy2;
            }
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        diag.u(0, j) = 1.0;
        diag.u(g.nx, j) = 1.0;
    }
    for (int i = 0; i < g.nx; ++i) {
        diag.v(i, 0) = 1.0;
        diag.v(i, g.ny) = 1.0;
    }

    auto applyA = [&](const VelocityField& x, VelocityField& out) {
        S.apply(x, out);
        if (gd_w) {
            const VelocityField gg = weighted_grad_div(x, *gd_w);
            for (std::size_t k = 0; k < out.u_data().size(); ++k) {
                out.u_data()[k] += gg.u_data()[k];
            }
            for (std::size_t k = 0; k < out.v_data().size(); ++k) {
                out.v_data()[k] += gg.v_data()[k];
            }
        }
        for (std::size_t k = 0; k < out.u_data().size(); ++k) {
            out.u_data()[k] = x.u_data()[k] - dt * out.u_data()[k];
        }
        for (std::size_t k = 0; k < out.v_data().size(); ++k) {
            out.v_data()[k] = x.v_data()[k] - dt * out.v_data()[k];
        }
        zero_boundary_faces(out);
    };

    const double bnorm = std::sqrt(vdot(rhs, rhs));
    VelocityField x = vel;
    zero_boundary_faces(x);
    if (bnorm == 0.0) {
        x = ug;
        if (iters_out) *iters_out = 0;
        return x;
    }

    VelocityField r(g), z(g), p(g), ap(g);
    applyA(x, ap);
    for (std::size_t k = 0; k < r.u_data().size(); ++k) {
        r.u_data()[k] = rhs.u_data()[k] - ap.u_data()[k];
    }
    for (std::size_t k = 0; k < r.v_data().size(); ++k) {
        r.v_data()[k] = rhs.v_data()[k] - ap.v_data()[k];
    }
    auto precond = [&](const VelocityField& rr, VelocityField& zz) {
        for (std::size_t k = 0; k < zz.u_data().size(); ++k) {
            zz.u_data()[k] = rr.u_data()[k] / diag.u_data()[k];
        }
        for (std::size_t k = 0; k < zz.v_data().size(); ++k) {
            zz.v_data()[k] = rr.v_data()[k] / diag.v_data()[k];
        }
    };
    precond(r, z);
    p = z;
    double rz = vdot(r, z);
    double rnorm = std::sqrt(vdot(r, r));
    int it = 0;
    for (; it < max_iters && rnorm > tol * bnorm; ++it) {
        applyA(p, ap);
        const double alpha = rz / vdot(p, ap);
        for (std::size_t k = 0; k < x.u_data().size(); ++k) {
            x.u_data()[k] += alpha * p.u_data()[k];
            r.u_data()[k] -= alpha * ap.u_data()[k];
        }
        for (std::size_t k = 0; k < x.v_data().size(); ++k) {
            x.v_data()[k] += alpha * p.v_data()[k];
            r.v_data()[k] -= alpha * ap.v_data()[k];
        }
        precond(r, z);
        const double rz_new = vdot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < p.u_data().size(); ++k) {
            p.u_data()[k] = z.u_data()[k] + beta * p.u_data()[k];
        }
        for (std::size_t k = 0; k < p.v_data().size(); ++k) {
            p.v_data()[k] = z.v_data()[k] + beta * p.v_data()[k];
        }
        rnorm = std::sqrt(vdot(r, r));
    }
    if (iters_out) *iters_out = it;
    if (rnorm > tol * bnorm) {
        throw NonConvergence("implicit viscous solve", it, rnorm / bnorm);
    }

    // Re-attach the fixed boundary faces.
    for (int j = 0; j < g.ny; ++j) {
        x.u(0, j) = ug.u(0, j);
        x.u(g.nx, j) = ug.u(g.nx, j);
    }
    for (int i = 0; i < g.nx; ++i) {
        x.v(i, 0) = ug.v(i, 0);
        x.v(i, g.ny) = ug.v(i, g.ny);
    }
    return x;
}

}  // namespace

VelocityField implicit_viscous_step(const VelocityField& vel, const ScalarField& nu,
                                    double dt, double tol, int max_iters,
                                    int* iters_out) {
    return viscous_solve(vel, nu, nullptr, dt, tol, max_iters, iters_out);
}

// ---------------------------------------------------------------------------
// Step workspace: exact sparse factorizations used as CG preconditioners
// ---------------------------------------------------------------------------

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Factorization = Eigen::SimplicialLDLT<SpMat>;

/// Preconditioned conjugate gradient on assembled matrices. The relative
/// residual criterion matches the matrix-free solvers.
Eigen::VectorXd sparse_pcg(const SpMat& A, const Factorization& M,
                           const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                           double tol, int max_iters, const char* context,
                           int* iters_out, double* residual_out) {
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        if (iters_out) *iters_out = 0;
        if (residual_out) *residual_out = 0.0;
        return Eigen::VectorXd::Zero(b.size());
    }
    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = b - A * x;
    Eigen::VectorXd z = M.solve(r);
    Eigen::VectorXd p = z, ap(b.size());
    double rz = r.dot(z);
    double rnorm = r.norm();
    int it = 0;
    for (; it < max_iters && rnorm > tol * bnorm; ++it) {
        ap.noalias() = A * p;
        const double alpha = rz / p.dot(ap);
        x += alpha * p;
        r -= alpha * ap;
        z = M.solve(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rnorm = r.norm();
    }
    if (iters_out) *iters_out = it;
    if (residual_out) *residual_out = rnorm / bnorm;
    if (rnorm > tol * bnorm) throw NonConvergence(context, it, rnorm / bnorm);
    return x;
}

SpMat assemble_pressure_matrix(const StaggeredGrid& g) {
    const int nx = g.nx, ny = g.ny;
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nx) * ny * 5);
    auto id = [ny](int i, int j) { return i * ny + j; };
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double d = 0.0;
            if (i > 0) {
                d += idx2;
                trip.emplace_back(id(i, j), id(i - 1, j), -idx2);
            }
            if (i < nx - 1) {
                d += idx2;
                trip.emplace_back(id(i, j), id(i + 1, j), -idx2);
            } else {
                d += 2.0 * idx2;
            }
            if (j > 0) {
                d += idy2;
                trip.emplace_back(id(i, j), id(i, j - 1), -idy2);
            }
            if (j < ny - 1) {
                d += idy2;
                trip.emplace_back(id(i, j), id(i, j + 1), -idy2);
            }
            trip.emplace_back(id(i, j), id(i, j), d);
        }
    }
    SpMat A(nx * ny, nx * ny);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

/// Assembles I - dt * stress_divergence(., nu) - dt * grad(gd_w div .) over
/// the interior velocity unknowns (boundary faces are held fixed and enter
/// through the right side). gd_w may be null to drop the grad-div block.
SpMat assemble_viscous_matrix(const StaggeredGrid& g, const ScalarField& nu,
                              const ViscousOperator& S, double dt,
                              const ScalarField* gd_w) {
    const int nx = g.nx, ny = g.ny;
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
    const double ixy = 0.5 / (g.dx * g.dy);
    const double ixyf = 1.0 / (g.dx * g.dy);
    const int n_u = (nx - 1) * ny;
    const int n = n_u + nx * (ny - 1);
    auto uid = [ny](int i, int j) { return (i - 1) * ny + j; };
    auto vid = [n_u, ny](int i, int j) { return n_u + i * (ny - 1) + (j - 1); };

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(n) * 9);
    for (int i = 1; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const int row = uid(i, j);
            trip.emplace_back(row, row, 1.0 - dt * S.diag_u(i, j));
            if (i > 1) trip.emplace_back(row, uid(i - 1, j), -dt * nu(i - 1, j) * idx2);
            if (i < nx - 1) trip.emplace_back(row, uid(i + 1, j), -dt * nu(i, j) * idx2);
            if (j > 0) {
                const double cs = S.corner(i, j);
                trip.emplace_back(row, uid(i, j - 1), -dt * cs * 0.5 * idy2);
                trip.emplace_back(row, vid(i, j), dt * cs * ixy);
                trip.emplace_back(row, vid(i - 1, j), -dt * cs * ixy);
            }
            if (j < ny - 1) {
                const double cn = S.corner(i, j + 1);
                trip.emplace_back(row, uid(i, j + 1), -dt * cn * 0.5 * idy2);
                trip.emplace_back(row, vid(i, j + 1), -dt * cn * ixy);
                trip.emplace_back(row, vid(i - 1, j + 1), dt * cn * ixy);
            }
            if (gd_w) {
                const double wr = (*gd_w)(i, j), wl = (*gd_w)(i - 1, j);
                trip.emplace_back(row, row, dt * (wr + wl) * idx2);
                if (i > 1) trip.emplace_back(row, uid(i - 1, j), -dt * wl * idx2);
                if (i < nx - 1) trip.emplace_back(row, uid(i + 1, j), -dt * wr * idx2);
                if (j > 0) {
                    trip.emplace_back(row, vid(i, j), dt * wr * ixyf);
                    trip.emplace_back(row, vid(i - 1, j), -dt * wl * ixyf);
                }
                if (j < ny - 1) {
                    trip.emplace_back(row, vid(i, j + 1), -dt * wr * ixyf);
                    trip.emplace_back(row, vid(i - 1, j + 1), dt * wl * ixyf);
                }
            }
        }
    }
    for (int i = 0; i < nx; ++i) {
        for (int j = 1; j < ny; ++j) {
            const int row = vid(i, j);
            trip.emplace_back(row, row, 1.0 - dt * S.diag_v(i, j));
            if (j > 1) trip.emplace_back(row, vid(i, j - 1), -dt * nu(i, j - 1) * idy2);
            if (j < ny - 1) trip.emplace_back(row, vid(i, j + 1), -dt * nu(i, j) * idy2);
            if (i > 0) {
                const double cw = S.corner(i, j);
                trip.emplace_back(row, vid(i - 1, j), -dt * cw * 0.5 * idx2);
                trip.emplace_back(row, uid(i, j), dt * cw * ixy);
                trip.emplace_back(row, uid(i, j - 1), -dt * cw * ixy);
            }
            if (i < nx - 1) {
                const double ce = S.corner(i + 1, j);
                trip.emplace_back(row, vid(i + 1, j), -dt * ce * 0.5 * idx2);
                trip.emplace_back(row, uid(i + 1, j), -dt * ce * ixy);
                trip.emplace_back(row, uid(i + 1, j - 1), dt * ce * ixy);
            }
            if (gd_w) {
                const double wt = (*gd_w)(i, j), wb = (*gd_w)(i, j - 1);
                trip.emplace_back(row, row, dt * (wt + wb) * idy2);
                if (j > 1) trip.emplace_back(row, vid(i, j - 1), -dt * wb * idy2);
                if (j < ny - 1) trip.emplace_back(row, vid(i, j + 1), -dt * wt * idy2);
                if (i > 0) {
                    trip.emplace_back(row, uid(i, j), dt * wt * ixyf);
                    trip.emplace_back(row, uid(i, j - 1), -dt * wb * ixyf);
                }
                if (i < nx - 1) {
                    trip.emplace_back(row, uid(i + 1, j), -dt * wt * ixyf);
                    trip.emplace_back(row, uid(i + 1, j - 1), dt * wb * ixyf);
                }
            }
        }
    }
    SpMat A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

}  // namespace

struct StepWorkspace::Impl {
    StaggeredGrid g;
    double dt = 0.0;
    bool implicit = false;
    bool augmented = false;
    ScalarField nu;
    ScalarField alw;
    std::unique_ptr<ViscousOperator> S;
    SpMat Ap;
    Factorization ldlt_p;
    SpMat Av;
    Factorization ldlt_v;

    ScalarField solve_pressure(const ScalarField& rhs, double tol, int max_iters,
                               int* iters_out, double* residual_out) const {
        const Eigen::Map<const Eigen::VectorXd> r(rhs.data().data(),
                                                  static_cast<long>(rhs.data().size()));
        const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(r.size());
        Eigen::VectorXd x = sparse_pcg(Ap, ldlt_p, -r, x0, tol, max_iters,
                                       "pressure Poisson solve", iters_out, residual_out);
        ScalarField phi(g);
        Eigen::VectorXd::Map(phi.data().data(), x.size()) = x;
        return phi;
    }

    VelocityField solve_viscous(const VelocityField& vel, double tol, int max_iters,
                                int* iters_out) const {
        const int nx = g.nx, ny = g.ny;
        const int n_u = (nx - 1) * ny;
        const int n = n_u + nx * (ny - 1);

        VelocityField ug(g);
        for (int j = 0; j < ny; ++j) {
            ug.u(0, j) = vel.u(0, j);
            ug.u(nx, j) = vel.u(nx, j);
        }
        for (int i = 0; i < nx; ++i) {
            ug.v(i, 0) = vel.v(i, 0);
            ug.v(i, ny) = vel.v(i, ny);
        }
        VelocityField sg(g);
        S->apply(ug, sg);
        if (augmented) {
            const VelocityField gg = weighted_grad_div(ug, alw);
            for (std::size_t k = 0; k < sg.u_data().size(); ++k) {
                sg.u_data()[k] += gg.u_data()[k];
            }
            for (std::size_t k = 0; k < sg.v_data().size(); ++k) {
                sg.v_data()[k] += gg.v_data()[k];
            }
        }

        Eigen::VectorXd b(n), x0(n);
        for (int i = 1; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const int k = (i - 1) * ny + j;
                b[k] = vel.u(i, j) + dt * sg.u(i, j);
                x0[k] = vel.u(i, j);
            }
        }
        for (int i = 0; i < nx; ++i) {
            for (int j = 1; j < ny; ++j) {
                const int k = n_u + i * (ny - 1) + (j - 1);
                b[k] = vel.v(i, j) + dt * sg.v(i, j);
                x0[k] = vel.v(i, j);
            }
        }

        Eigen::VectorXd x = sparse_pcg(Av, ldlt_v, b, x0, tol, max_iters,
                                       "implicit viscous solve", iters_out, nullptr);
        VelocityField out = ug;
        for (int i = 1; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) out.u(i, j) = x[(i - 1) * ny + j];
        }
        for (int i = 0; i < nx; ++i) {
            for (int j = 1; j < ny; ++j) out.v(i, j) = x[n_u + i * (ny - 1) + (j - 1)];
        }
        return out;
    }
};

StepWorkspace::StepWorkspace(const SimConfig& config, const ScalarField& nu)
    : impl_(std::make_unique<Impl>()) {
    if (config.dt <= 0.0) throw ConfigError("StepWorkspace requires a resolved dt > 0");
    impl_->g = config.grid();
    impl_->dt = config.dt;
    impl_->implicit = config.implicit_viscous_active();
    impl_->nu = nu;
    impl_->Ap = assemble_pressure_matrix(impl_->g);
    impl_->ldlt_p.compute(impl_->Ap);
    if (impl_->ldlt_p.info() != Eigen::Success) {
        throw NonConvergence("pressure matrix factorization", 0, 0.0);
    }
    if (impl_->implicit) {
        impl_->augmented = config.mode != Mode::Rigid;
        impl_->alw = augmentation_weight(impl_->nu);
        impl_->S = std::make_unique<ViscousOperator>(impl_->g, impl_->nu);
        impl_->Av = assemble_viscous_matrix(impl_->g, impl_->nu, *impl_->S, impl_->dt,
                                            impl_->augmented ? &impl_->alw : nullptr);
        impl_->ldlt_v.compute(impl_->Av);
        if (impl_->ldlt_v.info() != Eigen::Success) {
            throw NonConvergence("viscous matrix factorization", 0, 0.0);
        }
    }
}

StepWorkspace::~StepWorkspace() = default;
StepWorkspace::StepWorkspace(StepWorkspace&&) noexcept = default;
StepWorkspace& StepWorkspace::operator=(StepWorkspace&&) noexcept = default;

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

FlowState ipcs_step(const FlowState& state, const SimConfig& config, const ScalarField& nu,
                    const ScalarField* mask, double inlet_scale, StepReport* report,
                    const StepWorkspace* workspace, const VelocityField* forcing) {
    const StaggeredGrid& g = state.vel.grid();
    const double dt = config.dt;
    const bool implicit = config.implicit_viscous_active();
    // Rigid-mode mask zeroing happens outside the implicit solve, so the
    // grad-div augmentation cannot be kept matched there; rigid runs have no
    // high-viscosity region and do not need it.
    const bool augmented = implicit && config.mode != Mode::Rigid;

    // Substep 1: tentative velocity.
    VelocityField star = state.vel;
    {
        VelocityField grad_p = pressure_gradient(state.p);
        VelocityField conv;
        const bool with_conv = config.mode != Mode::Stokes;
        if (with_conv) {
            const ObstacleShape* near =
                config.shape.kind != ObstacleShape::Kind::None ? &config.shape : nullptr;
            conv = convection(state.vel, near);
        }
        VelocityField expl;
        if (!implicit) expl = stress_divergence(state.vel, nu);
        const double fx = config.body_force[0], fy = config.body_force[1];
        for (int i = 1; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                double a = -grad_p.u(i, j) + fx;
                if (forcing) a += forcing->u(i, j);
                if (with_conv) a -= conv.u(i, j);
                if (!implicit) a += expl.u(i, j);
                star.u(i, j) += dt * a;
            }
        }
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 1; j < g.ny; ++j) {
                double a = -grad_p.v(i, j) + fy;
                if (forcing) a += forcing->v(i, j);
                if (with_conv) a -= conv.v(i, j);
                if (!implicit) a += expl.v(i, j);
                star.v(i, j) += dt * a;
            }
        }
    }
    apply_boundary_conditions(star, config, inlet_scale, mask);
    int viscous_iters = 0;
    ScalarField alw;
    if (augmented) alw = augmentation_weight(nu);
    if (implicit) {
        if (workspace) {
            star = workspace->impl().solve_viscous(star, config.poisson_tol,
                                                   config.poisson_max_iters, &viscous_iters);
        } else {
            star = viscous_solve(star, nu, augmented ? &alw : nullptr, dt,
                                 config.poisson_tol, config.poisson_max_iters,
                                 &viscous_iters);
        }
        apply_boundary_conditions(star, config, inlet_scale, mask);
    }

    // Substep 2: pressure-increment Poisson solve.
    ScalarField rhs = divergence(star);
    for (double& r : rhs.data()) r /= dt;
    int piters = 0;
    double presid = 0.0;
    ScalarField phi =
        workspace ? workspace->impl().solve_pressure(rhs, config.poisson_tol,
                                                     config.poisson_max_iters, &piters, &presid)
                  : pressure_poisson(rhs, config.poisson_tol, config.poisson_max_iters,
                                     &piters, &presid);

    // Substep 3: projection and pressure update.
    FlowState next;
    next.vel = std::move(star);
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            next.vel.u(i, j) -= dt * (phi(i, j) - phi(i - 1, j)) / g.dx;
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        // Outlet face sees the Dirichlet phi=0 gauge half a cell away.
        next.vel.u(g.nx, j) -= dt * (0.0 - phi(g.nx - 1, j)) * 2.0 / g.dx;
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) {
            next.vel.v(i, j) -= dt * (phi(i, j) - phi(i, j - 1)) / g.dy;
        }
    }
    next.p = state.p;
    if (augmented) {
        // Grad-div augmented update, matched to the dt*grad(w div u) term
        // inside the implicit solve. Together they form an Uzawa iteration:
        // the pressure error of a mode k contracts by a factor bounded away
        // from 1, so the pressure inside a high-viscosity obstacle converges
        // at an O(1) rate instead of the ~dt/m creep of the plain increment.
        // rhs holds div(u*)/dt.
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                next.p(i, j) += phi(i, j) - alw(i, j) * dt * rhs(i, j);
            }
        }
    } else {
        for (std::size_t k = 0; k < next.p.data().size(); ++k) {
            next.p.data()[k] += phi.data()[k];
        }
    }
    if (config.mode == Mode::Rigid && mask) {
        apply_boundary_conditions(next.vel, config, inlet_scale, mask);
    }

    const double guard = 1e6 * config.velocity_scale();
    const double vmax = next.vel.max_abs();
    if (guard > 0.0 && vmax > guard) throw Instability(vmax, -1);
    if (!next.vel.all_finite() || !next.p.all_finite()) throw Instability(vmax, -1);

    if (report) {
        report->poisson_iters = piters;
        report->poisson_residual = presid;
        report->viscous_iters = viscous_iters;
        ScalarField div = divergence(next.vel);
        report->div_inf = div.max_abs();
        double change = 0.0;
        for (std::size_t k = 0; k < next.vel.u_data().size(); ++k) {
            change = std::max(change,
                              std::abs(next.vel.u_data()[k] - state.vel.u_data()[k]));
        }
        for (std::size_t k = 0; k < next.vel.v_data().size(); ++k) {
            change = std::max(change,
                              std::abs(next.vel.v_data()[k] - state.vel.v_data()[k]));
        }
        report->max_change = change;
    }
    return next;
}

SteadyResult run_to_steady(const SimConfig& config_in) {
    SimConfig config = config_in;
    config.validate();
    const StaggeredGrid g = config.grid();

    ScalarField nu;
    if (config.mode == Mode::Rigid) {
        // The rigid reference is the discrete m -> infinity limit of the
        // penalty scheme: masked faces are pinned to zero and the stencils
        // around the mask use the limiting harmonic face/corner viscosities
        // (2*nu_fluid at a mixed face, and so on). A finite huge value gives
        // those limits exactly in floating point; the fluid viscosity m is
        // otherwise ignored as configured.
        ViscositySpec limit = config.viscosity;
        limit.m = 1e30;
        nu = build_viscosity_field(g, config.shape, limit);
    } else {
        nu = build_viscosity_field(g, config.shape, config.viscosity);
    }
    ScalarField mask_field;
    const ScalarField* mask = nullptr;
    if (config.mode == Mode::Rigid && config.shape.kind != ObstacleShape::Kind::None) {
        mask_field = rigid_mask(g, config.shape);
        mask = &mask_field;
    }

    if (config.dt <= 0.0) {
        if (config.implicit_viscous_active()) {
            // Only the convective bound applies; fall back to the fluid
            // viscous bound for force-driven runs with no inlet.
            const double u = config.velocity_scale();
            const double h = std::min(g.dx, g.dy);
            config.dt = config.cfl_safety *
                        (u > 0.0 ? g.dx / u : 0.25 * h * h / config.viscosity.nu_fluid);
        } else {
            config.dt = stable_dt(config, config.nu_max());
        }
    }

    const double steady_tol = config.effective_steady_tol();
    const long ramp_steps =
        config.u_max > 0.0 ? std::max<long>(1, config.max_steps / 100) : 0;

    SteadyResult result;
    result.dt = config.dt;
    FlowState state{VelocityField(g), ScalarField(g)};
    const StepWorkspace workspace(config, nu);

    StepReport rep;
    for (long step = 1; step <= config.max_steps; ++step) {
        const double scale =
            ramp_steps > 0 ? std::min(1.0, static_cast<double>(step) / ramp_steps) : 1.0;
        try {
            state = ipcs_step(state, config, nu, mask, scale, &rep, &workspace);
        } catch (const Instability& e) {
            throw Instability(e.value, step);
        } catch (const NonConvergence& e) {
            throw NonConvergence(e.what(), e.iterations, e.residual, step);
        }
        result.steps = step;
        result.max_div_seen = std::max(result.max_div_seen, rep.div_inf);
        result.steady_residual = rep.max_change / config.dt;
        if (scale >= 1.0 && result.steady_residual <= steady_tol) {
            result.converged = true;
            break;
        }
    }
    result.div_norm = rep.div_inf;
    result.vel = std::move(state.vel);
    result.p = std::move(state.p);
    return result;
}

}  // namespace vpflow
