#pragma once

#include "vpflow/grid.hpp"

namespace vpflow {

/**
 * Rigid obstacle anchored to the bottom wall y=0.
 *
 * HalfDisc: disc of radius r centered at (center_x, 0); only the y>=0 half
 * lies in the channel. RectWall: rectangle
 * [center_x - width/2, center_x + width/2] x [0, height].
 */
struct ObstacleShape {
    enum class Kind { None, HalfDisc, RectWall };

    Kind kind = Kind::None;
    double center_x = 0.0;
    double radius = 0.0;  // HalfDisc
    double width = 0.0;   // RectWall
    double height = 0.0;  // RectWall

    static ObstacleShape none() { return {}; }
    static ObstacleShape half_disc(double center_x, double radius) {
        ObstacleShape s;
        s.kind = Kind::HalfDisc;
        s.center_x = center_x;
        s.radius = radius;
        return s;
    }
    static ObstacleShape rect_wall(double center_x, double width, double height) {
        ObstacleShape s;
        s.kind = Kind::RectWall;
        s.center_x = center_x;
        s.width = width;
        s.height = height;
        return s;
    }

    /// Throws ConfigError if dimensions are non-positive or the shape leaves
    /// the channel (it may touch only the bottom boundary).
    void validate(const StaggeredGrid& grid) const;

    /// Bounding box [x0,x1] x [0,y1]; degenerate for Kind::None.
    void bounding_box(double& x0, double& x1, double& y1) const;

    friend bool operator==(const ObstacleShape&, const ObstacleShape&) = default;
};

/// Two-valued viscosity: nu_fluid outside the obstacle, m inside.
struct ViscositySpec {
    double nu_fluid = 1.0;
    double m = 1.0;

    /// Enforces 0 < nu_fluid <= m (equality allowed for no-obstacle runs).
    void validate() const;

    friend bool operator==(const ViscositySpec&, const ViscositySpec&) = default;
};

/// Point membership test for the obstacle region S.
bool inside(const ObstacleShape& shape, double x, double y);

/// Cell-centered viscosity: m where the center lies in S, nu_fluid elsewhere.
ScalarField build_viscosity_field(const StaggeredGrid& grid, const ObstacleShape& shape,
                                  const ViscositySpec& spec);

/// Obstacle indicator at cell centers (1 inside, 0 outside); used by the
/// rigid reference mode to pin velocity to zero.
ScalarField rigid_mask(const StaggeredGrid& grid, const ObstacleShape& shape);

double harmonic_mean(double a, double b);

/// Viscosity on the x-face (i,j): harmonic mean of the two adjacent cells,
/// copy of the single cell on boundary faces. i in [0,nx], j in [0,ny).
double face_viscosity_u(const ScalarField& nu, int i, int j);

/// Viscosity on the y-face (i,j): as above with roles of i,j swapped.
double face_viscosity_v(const ScalarField& nu, int i, int j);

/// Viscosity at grid corner (i,j) (i in [0,nx], j in [0,ny]): harmonic mean
/// of the up-to-four surrounding cells.
double corner_viscosity(const ScalarField& nu, int i, int j);

}  // namespace vpflow
