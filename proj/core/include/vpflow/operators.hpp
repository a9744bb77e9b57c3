#pragma once

#include "vpflow/geometry.hpp"
#include "vpflow/grid.hpp"

namespace vpflow {

/// Discrete divergence at cell centers:
/// (u_{i+1,j}-u_{i,j})/dx + (v_{i,j+1}-v_{i,j})/dy.
ScalarField divergence(const VelocityField& vel);

/// Discrete pressure gradient on faces. Interior x-face (i,j) gets
/// (p_{i,j}-p_{i-1,j})/dx, analogously in y; boundary faces get 0 (pressure
/// boundary handling belongs to the solver).
VelocityField pressure_gradient(const ScalarField& p);

/**
 * Conservative discretization of div(nu * D u), the variable-viscosity
 * stress term, with D u = (grad u + grad u^T)/2.
 *
 * Normal fluxes nu*D11, nu*D22 are assembled at cell centers, shear fluxes
 * nu*D12 at grid corners with harmonically averaged viscosity. Shear fluxes
 * on the channel boundary use the channel conventions: no-slip walls at
 * y=0, y=ly, Dirichlet v=0 at the inlet and zero shear at the outlet.
 * Boundary faces of the result are 0.
 */
VelocityField stress_divergence(const VelocityField& vel, const ScalarField& nu);

/**
 * Advective-form convection (u . grad)u at velocity nodes. Central
 * differences in the interior, first-order upwind within one cell of the
 * channel boundary and of the obstacle's bounding box (if a shape is given).
 * Boundary faces of the result are 0.
 */
VelocityField convection(const VelocityField& vel,
                         const ObstacleShape* upwind_near = nullptr);

/// |D u|^2 = sum_ij D_ij^2 at cell centers; corner shear terms are averaged
/// inward. Boundary corners use one-sided differences of the available data
/// (no wall condition is assumed), so rigid motions give exactly zero.
ScalarField strain_norm_sq(const VelocityField& vel);

/**
 * Viscosity-aware variant used by the diagnostics integrals. A corner that
 * straddles the viscosity jump carries a two-sided difference; by continuity
 * of the shear stress 2 nu D12 across the jump, the one-sided strain seen by
 * a cell equals the corner value scaled by corner_viscosity / cell viscosity.
 * Each corner's off-diagonal is rescaled that way before the corner-to-center
 * average, which attributes the interface shear layer to the fluid side
 * instead of smearing it into the high-viscosity region. For constant nu
 * this is identical to strain_norm_sq(vel).
 */
ScalarField strain_norm_sq(const VelocityField& vel, const ScalarField& nu);

/// Shear rate D12 = (du/dy + dv/dx)/2 at grid corners, (nx+1) x (ny+1)
/// values in row-major order (index i*(ny+1)+j). With `noslip_boundaries`
/// the channel-boundary rows use the stress-operator conventions above;
/// otherwise they extrapolate one-sided from the interior.
std::vector<double> shear_rate_corners(const VelocityField& vel, bool noslip_boundaries);

}  // namespace vpflow
