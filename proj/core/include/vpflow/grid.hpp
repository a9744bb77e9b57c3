#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace vpflow {

/**
 * Uniform staggered (MAC) grid over the channel [0,lx] x [0,ly].
 *
 * Indexing convention, used by every operator in this library:
 *   - x-face i sits at x = i*dx,          i in [0, nx]
 *   - y-face j sits at y = j*dy,          j in [0, ny]
 *   - cell center (i,j) sits at ((i+1/2)*dx, (j+1/2)*dy)
 *
 * Pressure and viscosity live at cell centers, the u velocity component on
 * x-faces ((nx+1) x ny values) and the v component on y-faces (nx x (ny+1)).
 */
struct StaggeredGrid {
    double lx = 0.0;
    double ly = 0.0;
    int nx = 0;
    int ny = 0;
    double dx = 0.0;  // always lx/nx
    double dy = 0.0;  // always ly/ny

    double x_face(int i) const { return i * dx; }
    double y_face(int j) const { return j * dy; }
    double x_center(int i) const { return (i + 0.5) * dx; }
    double y_center(int j) const { return (j + 0.5) * dy; }
    double cell_area() const { return dx * dy; }

    friend bool operator==(const StaggeredGrid&, const StaggeredGrid&) = default;
};

/// Builds a grid, rejecting non-positive dimensions and counts below 2.
StaggeredGrid make_grid(double lx, double ly, int nx, int ny);

/// Cell-centered scalar values (pressure, viscosity, diagnostics), nx x ny.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const StaggeredGrid& grid)
        : grid_(grid), values_(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0) {}

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }

    const StaggeredGrid& grid() const { return grid_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const;
    double max_abs() const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_.ny + j;
    }

    StaggeredGrid grid_;
    std::vector<double> values_;
};

/// MAC velocity: u on x-faces ((nx+1) x ny), v on y-faces (nx x (ny+1)).
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(const StaggeredGrid& grid)
        : grid_(grid),
          u_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, 0.0),
          v_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), 0.0) {}

    double& u(int i, int j) { return u_[uindex(i, j)]; }
    double u(int i, int j) const { return u_[uindex(i, j)]; }
    double& v(int i, int j) { return v_[vindex(i, j)]; }
    double v(int i, int j) const { return v_[vindex(i, j)]; }

    const StaggeredGrid& grid() const { return grid_; }
    std::vector<double>& u_data() { return u_; }
    const std::vector<double>& u_data() const { return u_; }
    std::vector<double>& v_data() { return v_; }
    const std::vector<double>& v_data() const { return v_; }

    bool all_finite() const;
    double max_abs() const;

private:
    std::size_t uindex(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_.ny + j;
    }
    std::size_t vindex(int i, int j) const {
        return static_cast<std::size_t>(i) * (grid_.ny + 1) + j;
    }

    StaggeredGrid grid_;
    std::vector<double> u_;
    std::vector<double> v_;
};

/// Averages each velocity component to cell centers (two adjacent faces each).
std::pair<ScalarField, ScalarField> interpolate_velocity_to_centers(const VelocityField& vel);

}  // namespace vpflow
