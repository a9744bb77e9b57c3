#include <benchmark/benchmark.h>

#include <cmath>

#include "vpflow/geometry.hpp"
#include "vpflow/operators.hpp"
#include "vpflow/solver.hpp"

namespace {

using namespace vpflow;

SimConfig bench_config(int nx, int ny) {
    SimConfig c;
    c.nx = nx;
    c.ny = ny;
    c.shape = ObstacleShape::half_disc(0.4, 0.15);
    c.viscosity.m = 1e4;
    return c;
}

VelocityField bench_field(const StaggeredGrid& g) {
    VelocityField vel(g);
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            vel.u(i, j) = std::sin(3.0 * g.x_face(i)) * std::cos(5.0 * g.y_center(j));
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            vel.v(i, j) = std::cos(2.0 * g.x_center(i)) * std::sin(4.0 * g.y_face(j));
        }
    }
    return vel;
}

void BM_StressDivergence(benchmark::State& state) {
    const SimConfig c = bench_config(static_cast<int>(state.range(0)),
                                     static_cast<int>(state.range(0)) / 3);
    const StaggeredGrid g = c.grid();
    const ScalarField nu = build_viscosity_field(g, c.shape, c.viscosity);
    const VelocityField vel = bench_field(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stress_divergence(vel, nu));
    }
}
BENCHMARK(BM_StressDivergence)->Arg(96)->Arg(192)->Arg(384);

void BM_Convection(benchmark::State& state) {
    const SimConfig c = bench_config(static_cast<int>(state.range(0)),
                                     static_cast<int>(state.range(0)) / 3);
    const StaggeredGrid g = c.grid();
    const VelocityField vel = bench_field(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(convection(vel, &c.shape));
    }
}
BENCHMARK(BM_Convection)->Arg(96)->Arg(192)->Arg(384);

void BM_IpcsStep(benchmark::State& state) {
    SimConfig c = bench_config(static_cast<int>(state.range(0)),
                               static_cast<int>(state.range(0)) / 3);
    const StaggeredGrid g = c.grid();
    const ScalarField nu = build_viscosity_field(g, c.shape, c.viscosity);
    c.dt = c.cfl_safety * g.dx / c.u_max;
    const StepWorkspace ws(c, nu);
    FlowState s{VelocityField(g), ScalarField(g)};
    for (auto _ : state) {
        s = ipcs_step(s, c, nu, nullptr, 1.0, nullptr, &ws);
    }
}
BENCHMARK(BM_IpcsStep)->Arg(96)->Arg(192);

}  // namespace

BENCHMARK_MAIN();
