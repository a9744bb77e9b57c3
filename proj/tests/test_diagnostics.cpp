#include <doctest.h>

#include <cmath>

#include "vpflow/diagnostics.hpp"
#include "vpflow/errors.hpp"

using namespace vpflow;

TEST_SUITE_BEGIN("diagnostics");

namespace {

// u = a*y on x-faces, v = b*x on y-faces: constant-gradient field.
VelocityField linear_field(const StaggeredGrid& g, double a, double b) {
    VelocityField vel(g);
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) vel.u(i, j) = a * g.y_center(j);
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) vel.v(i, j) = b * g.x_face(i);
    }
    return vel;
}

}  // namespace

TEST_CASE("deformation energy inside the obstacle") {
    const StaggeredGrid g = make_grid(1.2, 0.41, 96, 32);
    const ObstacleShape wall = ObstacleShape::rect_wall(0.4, 0.1, 0.16);

    SUBCASE("rigid rotation has zero strain") {
        // u = -y, v = x: D = 0 exactly in the discrete strain too.
        const VelocityField vel = linear_field(g, -1.0, 1.0);
        CHECK(deformation_energy_in_S(vel, wall, nullptr) == doctest::Approx(0.0));
    }

    SUBCASE("pure shear integrates |D|^2 = 1/2 over the wall cells") {
        const VelocityField vel = linear_field(g, 1.0, 0.0);
        long cells = 0;
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                if (inside(wall, g.x_center(i), g.y_center(j))) ++cells;
            }
        }
        REQUIRE(cells > 0);
        CHECK(deformation_energy_in_S(vel, wall, nullptr) ==
              doctest::Approx(0.5 * cells * g.cell_area()).epsilon(1e-12));
    }

    SUBCASE("no obstacle returns zero and warns") {
        bool warned = false;
        const VelocityField vel = linear_field(g, 1.0, 0.0);
        CHECK(deformation_energy_in_S(vel, ObstacleShape::none(), &warned) == 0.0);
        CHECK(warned);
    }
}

TEST_CASE("total dissipation") {
    const StaggeredGrid g = make_grid(1.2, 0.41, 48, 16);
    ScalarField nu(g);
    for (double& x : nu.data()) x = 3.0;

    SUBCASE("pure shear gives nu/2 times the area") {
        const VelocityField vel = linear_field(g, 1.0, 0.0);
        CHECK(total_dissipation(vel, nu) ==
              doctest::Approx(3.0 * 0.5 * 1.2 * 0.41).epsilon(1e-12));
    }

    SUBCASE("zero field dissipates nothing") {
        CHECK(total_dissipation(VelocityField(g), nu) == 0.0);
    }
}

TEST_CASE("gradient norms") {
    const StaggeredGrid g = make_grid(1.0, 1.0, 16, 16);

    SUBCASE("zero field") {
        CHECK(max_gradient(VelocityField(g)) == 0.0);
        CHECK(gradient_l2(VelocityField(g)) == 0.0);
    }

    SUBCASE("shear u = y has max gradient 1") {
        const VelocityField vel = linear_field(g, 1.0, 0.0);
        CHECK(max_gradient(vel) == doctest::Approx(1.0).epsilon(1e-12));
        // only du/dy contributes: ||grad u||_L2 = sqrt(area)
        CHECK(gradient_l2(vel) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("diagonal stretching u = 2x, v = -2y") {
        VelocityField vel(g);
        for (int i = 0; i <= g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) vel.u(i, j) = 2.0 * g.x_face(i);
        }
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j <= g.ny; ++j) vel.v(i, j) = -2.0 * g.y_face(j);
        }
        CHECK(max_gradient(vel) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(gradient_l2(vel) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    }
}

TEST_CASE("profile extraction") {
    const StaggeredGrid g = make_grid(1.2, 0.41, 48, 16);
    VelocityField vel(g);
    for (double& x : vel.u_data()) x = 0.25;

    SUBCASE("uniform u gives a flat profile of the right size") {
        const ProfileRecord rec = extract_profile(vel, 0.4);
        CHECK(rec.x_station == 0.4);
        CHECK(rec.y.size() == static_cast<std::size_t>(g.ny));
        CHECK(rec.magnitude.size() == rec.y.size());
        for (double m : rec.magnitude) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));
        for (std::size_t k = 1; k < rec.y.size(); ++k) CHECK(rec.y[k] > rec.y[k - 1]);
        CHECK(rec.y.front() == doctest::Approx(0.5 * g.dy));
        CHECK(rec.y.back() == doctest::Approx(g.ly - 0.5 * g.dy));
    }

    SUBCASE("stations outside the channel are rejected") {
        CHECK_THROWS_AS(extract_profile(vel, 0.0), ConfigError);
        CHECK_THROWS_AS(extract_profile(vel, 1.2), ConfigError);
        CHECK_THROWS_AS(extract_profile(vel, -0.1), ConfigError);
    }
}

TEST_CASE("profile differences") {
    const StaggeredGrid g = make_grid(1.2, 0.41, 48, 16);
    VelocityField vel(g);
    for (double& x : vel.u_data()) x = 0.25;
    const ProfileRecord a = extract_profile(vel, 0.4);

    SUBCASE("identical profiles differ by zero") {
        const ProfileDiff d = profile_difference(a, a);
        CHECK(d.l2 == 0.0);
        CHECK(d.linf == 0.0);
        CHECK(d.relative_l2 == 0.0);
    }

    SUBCASE("uniform offset shows up in every norm") {
        ProfileRecord b = a;
        for (double& m : b.magnitude) m += 0.1;
        const ProfileDiff d = profile_difference(a, b);
        CHECK(d.linf == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(d.l2 == doctest::Approx(0.1 * std::sqrt(g.ny * g.dy)).epsilon(1e-12));
        CHECK(d.relative_l2 == doctest::Approx(0.1 / 0.35).epsilon(1e-12));
    }

    SUBCASE("mismatched profiles are rejected") {
        ProfileRecord b = a;
        b.magnitude.pop_back();
        b.y.pop_back();
        CHECK_THROWS_AS(profile_difference(a, b), ConfigError);
        ProfileRecord c = a;
        c.x_station = 0.5;
        CHECK_THROWS_AS(profile_difference(a, c), ConfigError);
    }
}

TEST_CASE("collect is consistent with the individual diagnostics") {
    SimConfig c;
    c.nx = 48;
    c.ny = 16;
    c.shape = ObstacleShape::half_disc(0.4, 0.15);
    c.viscosity.m = 100.0;
    const StaggeredGrid g = c.grid();
    const VelocityField vel = linear_field(g, 0.7, -0.2);
    const ScalarField p(g);

    const DiagnosticsRecord rec = collect(vel, p, c);
    CHECK(rec.m == 100.0);
    CHECK(!rec.shape_warning);
    const ScalarField nu = build_viscosity_field(g, c.shape, c.viscosity);
    CHECK(rec.deformation_in_S ==
          doctest::Approx(deformation_energy_in_S(vel, c.shape, nullptr, &nu))
              .epsilon(1e-15));
    CHECK(rec.total_dissipation == doctest::Approx(total_dissipation(vel, nu)));
    CHECK(rec.grad_max == doctest::Approx(max_gradient(vel)));
    CHECK(rec.grad_l2 == doctest::Approx(gradient_l2(vel)));
    CHECK(rec.profile.magnitude.size() == static_cast<std::size_t>(g.ny));
    CHECK(!rec.l2_diff_vs_rigid.has_value());

    SUBCASE("rigid mode costs fluid viscosity in the dissipation") {
        SimConfig cr = c;
        cr.mode = Mode::Rigid;
        ScalarField nu_fluid(g);
        for (double& x : nu_fluid.data()) x = cr.viscosity.nu_fluid;
        const DiagnosticsRecord rr = collect(vel, p, cr);
        CHECK(rr.total_dissipation == doctest::Approx(total_dissipation(vel, nu_fluid)));
    }
}

TEST_SUITE_END();
