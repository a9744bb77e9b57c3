#include "vpflow/geometry.hpp"

#include <algorithm>
#include <string>

#include "vpflow/errors.hpp"

namespace vpflow {

void ObstacleShape::validate(const StaggeredGrid& grid) const {
    switch (kind) {
        case Kind::None:
            return;
        case Kind::HalfDisc:
            if (!(radius > 0.0)) throw ConfigError("half-disc radius must be positive");
            if (center_x - radius <= 0.0 || center_x + radius >= grid.lx) {
                throw ConfigError("half-disc must lie strictly inside the channel in x");
            }
            if (radius > grid.ly) {
                throw ConfigError("half-disc exceeds the channel height");
            }
            return;
        case Kind::RectWall:
            if (!(width > 0.0) || !(height > 0.0)) {
                throw ConfigError("wall width and height must be positive");
            }
            if (center_x - width / 2 <= 0.0 || center_x + width / 2 >= grid.lx) {
                throw ConfigError("wall must lie strictly inside the channel in x");
            }
            if (height > grid.ly) {
                throw ConfigError("wall exceeds the channel height");
            }
            return;
    }
}

void ObstacleShape::bounding_box(double& x0, double& x1, double& y1) const {
    switch (kind) {
        case Kind::None:
            x0 = x1 = y1 = 0.0;
            return;
        case Kind::HalfDisc:
            x0 = center_x - radius;
            x1 = center_x + radius;
            y1 = radius;
            return;
        case Kind::RectWall:
            x0 = center_x - width / 2;
            x1 = center_x + width / 2;
            y1 = height;
            return;
    }
}

void ViscositySpec::validate() const {
    if (!(nu_fluid > 0.0)) throw ConfigError("fluid viscosity must be positive");
    if (!(nu_fluid <= m)) {
        throw ConfigError("obstacle viscosity m must satisfy m >= nu_fluid (penalty regime)");
    }
}

bool inside(const ObstacleShape& shape, double x, double y) {
    switch (shape.kind) {
        case ObstacleShape::Kind::None:
            return false;
        case ObstacleShape::Kind::HalfDisc: {
            const double rx = x - shape.center_x;
            return y >= 0.0 && rx * rx + y * y < shape.radius * shape.radius;
        }
        case ObstacleShape::Kind::RectWall:
            return std::abs(x - shape.center_x) < shape.width / 2 && y >= 0.0 &&
                   y < shape.height;
    }
    return false;
}

ScalarField build_viscosity_field(const StaggeredGrid& grid, const ObstacleShape& shape,
                                  const ViscositySpec& spec) {
    spec.validate();
    shape.validate(grid);
    ScalarField nu(grid);
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            nu(i, j) = inside(shape, grid.x_center(i), grid.y_center(j)) ? spec.m
                                                                         : spec.nu_fluid;
        }
    }
    return nu;
}

ScalarField rigid_mask(const StaggeredGrid& grid, const ObstacleShape& shape) {
    shape.validate(grid);
    ScalarField mask(grid);
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            mask(i, j) = inside(shape, grid.x_center(i), grid.y_center(j)) ? 1.0 : 0.0;
        }
    }
    return mask;
}

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

double face_viscosity_u(const ScalarField& nu, int i, int j) {
    const StaggeredGrid& g = nu.grid();
    if (i == 0) return nu(0, j);
    if (i == g.nx) return nu(g.nx - 1, j);
    return harmonic_mean(nu(i - 1, j), nu(i, j));
}

double face_viscosity_v(const ScalarField& nu, int i, int j) {
    const StaggeredGrid& g = nu.grid();
    if (j == 0) return nu(i, 0);
    if (j == g.ny) return nu(i, g.ny - 1);
    return harmonic_mean(nu(i, j - 1), nu(i, j));
}

double corner_viscosity(const ScalarField& nu, int i, int j) {
    const StaggeredGrid& g = nu.grid();
    const int ilo = std::max(i - 1, 0), ihi = std::min(i, g.nx - 1);
    const int jlo = std::max(j - 1, 0), jhi = std::min(j, g.ny - 1);
    double inv_sum = 0.0;
    int count = 0;
    for (int ii = ilo; ii <= ihi; ++ii) {
        for (int jj = jlo; jj <= jhi; ++jj) {
            inv_sum += 1.0 / nu(ii, jj);
            ++count;
        }
    }
    return count / inv_sum;
}

}  // namespace vpflow
