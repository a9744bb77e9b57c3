#pragma once

#include <optional>
#include <vector>

#include "vpflow/solver.hpp"

namespace vpflow {

/// Velocity-magnitude samples along a vertical cross-section.
struct ProfileRecord {
    double x_station = 0.0;
    std::vector<double> y;          // cell-center heights, strictly increasing
    std::vector<double> magnitude;  // |u| at those heights
};

struct ProfileDiff {
    double l2 = 0.0;
    double linf = 0.0;
    double relative_l2 = 0.0;  // l2 normalized by ||b||
};

/// Everything the theorems and figures are checked against, for one run.
struct DiagnosticsRecord {
    double m = 0.0;                  // penalty viscosity of the run
    double deformation_in_S = 0.0;   // integral of |D u|^2 over the obstacle
    double total_dissipation = 0.0;  // integral of nu |D u|^2 over the channel
    double grad_max = 0.0;           // ||grad u||_Linf
    double grad_l2 = 0.0;            // ||grad u||_L2
    double div_max = 0.0;            // ||div u||_Linf
    ProfileRecord profile;
    std::optional<double> l2_diff_vs_rigid;
    bool shape_warning = false;  // deformation requested without an obstacle
    long steps = 0;
    bool converged = false;
};

/// Integral of |D u|^2 over the cells whose centers lie inside the obstacle.
/// Returns 0 (setting *warned) when the shape is None. When nu is given the
/// viscosity-aware strain (one-sided at the interface, see strain_norm_sq
/// overloads) is integrated; the two agree for constant nu.
double deformation_energy_in_S(const VelocityField& vel, const ObstacleShape& shape,
                               bool* warned = nullptr, const ScalarField* nu = nullptr);

/// Integral of nu |D u|^2 over the whole channel (viscosity-aware strain).
double total_dissipation(const VelocityField& vel, const ScalarField& nu);

/// Max over all nodes of |du_i/dx_j| (one-sided differences at boundaries).
double max_gradient(const VelocityField& vel);

/// L2 norm of the velocity gradient.
double gradient_l2(const VelocityField& vel);

/// Velocity magnitude along the cell-center column nearest x_station.
ProfileRecord extract_profile(const VelocityField& vel, double x_station);

/// Discrete L2 / Linf / relative-L2 distance between two profiles taken at
/// the same station with the same sample count.
ProfileDiff profile_difference(const ProfileRecord& a, const ProfileRecord& b);

/// Fills a record from a converged state.
DiagnosticsRecord collect(const VelocityField& vel, const ScalarField& p,
                          const SimConfig& config);

}  // namespace vpflow
