#include <doctest.h>

#include <cmath>

#include "vpflow/errors.hpp"
#include "vpflow/grid.hpp"

using namespace vpflow;

TEST_SUITE_BEGIN("grid");

TEST_CASE("make_grid derives spacings") {
    const StaggeredGrid g = make_grid(1.2, 0.41, 192, 64);
    CHECK(g.dx == doctest::Approx(0.00625).epsilon(1e-15));
    CHECK(g.dy == doctest::Approx(0.00640625).epsilon(1e-15));
    CHECK(g.dx * g.nx == doctest::Approx(g.lx).epsilon(1e-15));
    CHECK(g.dy * g.ny == doctest::Approx(g.ly).epsilon(1e-15));

    const StaggeredGrid s = make_grid(1.0, 1.0, 2, 2);
    CHECK(s.dx == 0.5);
    CHECK(s.dy == 0.5);
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 2, 1), ConfigError);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 1, 2), ConfigError);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 2, 2), ConfigError);
    CHECK_THROWS_AS(make_grid(1.0, -0.5, 2, 2), ConfigError);
}

TEST_CASE("grid addressing convention") {
    const StaggeredGrid g = make_grid(1.0, 0.5, 4, 2);
    CHECK(g.x_face(0) == 0.0);
    CHECK(g.x_face(4) == doctest::Approx(1.0));
    CHECK(g.x_center(0) == doctest::Approx(0.125));
    CHECK(g.y_center(1) == doctest::Approx(0.375));
    CHECK(g.cell_area() == doctest::Approx(0.0625));
}

TEST_CASE("fields zero-initialize and scan finite") {
    const StaggeredGrid g = make_grid(1.0, 1.0, 3, 4);
    ScalarField p(g);
    VelocityField vel(g);
    CHECK(p.data().size() == 12);
    CHECK(vel.u_data().size() == 4 * 4);
    CHECK(vel.v_data().size() == 3 * 5);
    CHECK(p.max_abs() == 0.0);
    CHECK(vel.max_abs() == 0.0);
    CHECK(p.all_finite());
    CHECK(vel.all_finite());

    vel.u(2, 1) = std::nan("");
    CHECK(!vel.all_finite());
}

TEST_CASE("interpolation to centers") {
    const StaggeredGrid g = make_grid(1.0, 1.0, 4, 4);
    VelocityField vel(g);

    SUBCASE("constants are exact") {
        for (double& x : vel.u_data()) x = 3.0;
        auto [uc, vc] = interpolate_velocity_to_centers(vel);
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                CHECK(uc(i, j) == doctest::Approx(3.0).epsilon(1e-15));
                CHECK(vc(i, j) == 0.0);
            }
        }
    }

    SUBCASE("linear-in-x u recovers the center coordinate") {
        for (int i = 0; i <= g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) vel.u(i, j) = g.x_face(i);
        }
        auto [uc, vc] = interpolate_velocity_to_centers(vel);
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                CHECK(uc(i, j) == doctest::Approx(g.x_center(i)).epsilon(1e-15));
            }
        }
    }
}

namespace {

double interp_error(int n) {
    const StaggeredGrid g = make_grid(1.0, 1.0, n, n);
    VelocityField vel(g);
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            vel.u(i, j) = std::sin(3.0 * g.x_face(i)) * std::cos(2.0 * g.y_center(j));
        }
    }
    auto [uc, vc] = interpolate_velocity_to_centers(vel);
    double err = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double exact =
                std::sin(3.0 * g.x_center(i)) * std::cos(2.0 * g.y_center(j));
            err = std::max(err, std::abs(uc(i, j) - exact));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("interpolation is second order") {
    const double ratio = interp_error(16) / interp_error(32);
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_SUITE_END();
