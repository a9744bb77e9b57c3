#pragma once

#include <array>
#include <memory>

#include "vpflow/geometry.hpp"
#include "vpflow/grid.hpp"
#include "vpflow/operators.hpp"

namespace vpflow {

enum class Mode { Penalty, Rigid, Stokes };
enum class ImplicitViscous { Auto, On, Off };

/// Full description of one simulation run.
struct SimConfig {
    // Grid.
    double lx = 1.2;
    double ly = 0.41;
    int nx = 192;
    int ny = 64;

    ObstacleShape shape;      // default: no obstacle
    ViscositySpec viscosity;  // nu_fluid outside S, m inside

    Mode mode = Mode::Penalty;

    double u_max = 0.3;                     // inlet parabola peak
    std::array<double, 2> body_force{0.0, 0.0};

    double dt = 0.0;          // 0 = choose automatically via stable_dt
    double cfl_safety = 0.4;  // in (0,1]
    double steady_tol = 0.0;  // 0 = auto: 1e-6 * velocity scale / ly
    long max_steps = 20000;
    double poisson_tol = 1e-10;       // relative residual
    int poisson_max_iters = 50000;
    ImplicitViscous implicit_viscous = ImplicitViscous::Auto;

    double profile_station = 0.4;  // diagnostics cross-section

    void validate() const;  // throws ConfigError
    StaggeredGrid grid() const { return make_grid(lx, ly, nx, ny); }

    /// Velocity magnitude used for stability guards and auto tolerances:
    /// max of the inlet peak and a body-force based estimate |f| ly^2 / nu.
    double velocity_scale() const;

    /// Effective steady tolerance (resolves the auto default).
    double effective_steady_tol() const;

    /// True when the viscous term is solved implicitly. Auto resolves to
    /// implicit whenever the explicit viscous dt bound is more restrictive
    /// than the convective one.
    bool implicit_viscous_active() const;

    /// Largest viscosity the time step must respect in explicit stepping.
    double nu_max() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct FlowState {
    VelocityField vel;
    ScalarField p;
};

/// Per-step instrumentation.
struct StepReport {
    int poisson_iters = 0;
    double poisson_residual = 0.0;
    int viscous_iters = 0;
    double div_inf = 0.0;     // ||div u||_inf after the projection
    double max_change = 0.0;  // ||u^{n+1}-u^n||_inf
};

struct SteadyResult {
    VelocityField vel;
    ScalarField p;
    long steps = 0;
    double steady_residual = 0.0;  // ||u^{n+1}-u^n||_inf / dt at the last step
    double div_norm = 0.0;         // ||div u||_inf of the final state
    double max_div_seen = 0.0;     // max over all steps
    bool converged = false;
    double dt = 0.0;               // time step actually used
};

/// Imposes the channel boundary data: parabolic inlet (scaled by
/// inlet_scale), copy-out outlet, no-slip walls; in Rigid mode every face
/// touching a masked cell is zeroed (pass the mask).
void apply_boundary_conditions(VelocityField& vel, const SimConfig& config,
                               double inlet_scale = 1.0,
                               const ScalarField* mask = nullptr);

/**
 * Solves the pressure-correction Poisson problem: homogeneous Neumann on
 * walls and inlet, Dirichlet phi=0 on the outlet face (the pressure gauge),
 * by Jacobi-preconditioned conjugate gradient to a relative residual <= tol.
 * Throws NonConvergence when max_iters is exhausted.
 */
ScalarField pressure_poisson(const ScalarField& rhs, double tol, int max_iters,
                             int* iters_out = nullptr, double* residual_out = nullptr);

/// Applies the discrete Poisson operator used by pressure_poisson (exposed
/// for manufactured-solution testing).
ScalarField poisson_operator(const ScalarField& phi);

/**
 * Solves (I - dt * stress_divergence(. , nu)) u_new = vel with the boundary
 * faces of vel held fixed, by conjugate gradient on the coupled velocity
 * system. Throws NonConvergence.
 */
VelocityField implicit_viscous_step(const VelocityField& vel, const ScalarField& nu,
                                    double dt, double tol = 1e-12,
                                    int max_iters = 100000, int* iters_out = nullptr);

/// Explicit-stability time step: cfl_safety * min(dx/|u|, 0.25*min(dx,dy)^2/nu_max).
double stable_dt(const SimConfig& config, double nu_max);

/**
 * Cached factorizations that precondition the per-step linear solves. Valid
 * for one grid, viscosity field and time step; run_to_steady builds one and
 * reuses it across the whole march. Requires config.dt > 0.
 */
class StepWorkspace {
public:
    StepWorkspace(const SimConfig& config, const ScalarField& nu);
    ~StepWorkspace();
    StepWorkspace(StepWorkspace&&) noexcept;
    StepWorkspace& operator=(StepWorkspace&&) noexcept;

    struct Impl;
    Impl& impl() const { return *impl_; }

private:
    std::unique_ptr<Impl> impl_;
};

/**
 * One step of the incremental pressure-correction scheme: explicit tentative
 * velocity (viscous part implicit when configured), pressure-increment
 * Poisson solve, projection, pressure update. Rigid mode re-zeroes masked
 * faces after the projection. The optional workspace accelerates the linear
 * solves without changing what they solve. An optional per-face forcing field
 * is added to the constant body force (used by the energy-estimate checks,
 * where a constant force is a pure gradient and drives no flow).
 *
 * On the implicit path (outside Rigid mode) the tentative solve carries a
 * grad-div augmentation dt*grad(w div u) and the pressure update becomes
 * p += phi - w*div(u_tentative), with w the viscosity field zeroed on the
 * three outlet-adjacent columns. The steady state is unchanged (the extra
 * terms vanish when div u_tentative = 0); the pairing makes the pressure
 * inside a high-viscosity obstacle converge at an O(1) per-step rate
 * instead of O(dt/m). Explicit steps use the plain update p += phi.
 */
FlowState ipcs_step(const FlowState& state, const SimConfig& config, const ScalarField& nu,
                    const ScalarField* mask = nullptr, double inlet_scale = 1.0,
                    StepReport* report = nullptr, const StepWorkspace* workspace = nullptr,
                    const VelocityField* forcing = nullptr);

/// Marches from a zero initial state until the steady criterion
/// ||u^{n+1}-u^n||_inf / dt <= steady_tol or max_steps.
SteadyResult run_to_steady(const SimConfig& config);

}  // namespace vpflow
