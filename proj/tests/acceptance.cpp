// Acceptance gate: runs the ten release criteria end to end and prints one
// [PASS]/[FAIL] line per criterion. Exit code 0 only when every line passes.
//
// Usage: vpflow_acceptance <configs-dir>
// The configs directory must contain halfball.cfg and wall.cfg.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vpflow/diagnostics.hpp"
#include "vpflow/geometry.hpp"
#include "vpflow/harness.hpp"
#include "vpflow/operators.hpp"
#include "vpflow/solver.hpp"

using namespace vpflow;
namespace fs = std::filesystem;

namespace {

// Derived thresholds (the monotonicity requirements are never adjustable).
constexpr double kSweepBudgetSeconds = 900.0;  // criterion 1 runtime budget
constexpr double kDecayHeadroom = 10.0;        // criterion 1: m*def vs its m=10 value
constexpr double kWallDecayFactor = 1e-3;      // criterion 2: def(1e5) vs def(10)
constexpr double kProfileTolerance = 0.05;     // criterion 3: rel L2 at largest m
constexpr double kGradMaxSpread = 2.0;         // criterion 4
constexpr double kPoiseuilleTol = 0.02;        // criterion 5 at ny=32
constexpr double kOrderRatio = 3.0;            // criterion 5: ny=32 vs ny=64 error
constexpr double kIdentityTol = 1e-12;         // criterion 7
constexpr double kLinearityTol = 1e-6;         // criterion 8
constexpr double kOracleTol = 1e-10;           // criterion 10

bool g_all_ok = true;

void report(int n, bool ok, const std::string& msg) {
    std::printf("[%s] %d: %s\n", ok ? "PASS" : "FAIL", n, msg.c_str());
    std::fflush(stdout);
    g_all_ok = g_all_ok && ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] < v[k - 1])) return false;
    }
    return true;
}

struct SweepData {
    BenchmarkPlan plan;
    BenchmarkOutcome outcome;
    double seconds = 0.0;
    fs::path dir;
};

SweepData run_sweep(const fs::path& config_path, const fs::path& out_dir) {
    SweepData data;
    data.plan = parse_config(slurp(config_path));
    data.plan.output_dir = out_dir.string();
    data.plan.formats = {OutputFormat::Csv};
    data.dir = out_dir;
    const auto t0 = std::chrono::steady_clock::now();
    data.outcome = run_benchmark(data.plan, 1);
    data.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
    return data;
}

// Sweep-member records in sweep order (index 0 is the rigid reference).
std::vector<const DiagnosticsRecord*> sweep_records(const SweepData& d) {
    std::vector<const DiagnosticsRecord*> out;
    for (const RunResult& rr : d.outcome.runs) {
        if (rr.label != "rigid") out.push_back(&rr.record);
    }
    return out;
}

VelocityField random_interior(const StaggeredGrid& g, std::mt19937& rng,
                              int margin = 1) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    VelocityField vel(g);
    for (int i = margin; i <= g.nx - margin; ++i) {
        for (int j = margin - 1; j <= g.ny - margin; ++j) vel.u(i, j) = dist(rng);
    }
    for (int i = margin - 1; i <= g.nx - margin; ++i) {
        for (int j = margin; j <= g.ny - margin; ++j) vel.v(i, j) = dist(rng);
    }
    return vel;
}

struct PoiseuilleRun {
    double profile_error = 0.0;  // max relative error at x = lx/2
    double max_div_seen = 0.0;
    double div_bound = 0.0;
    bool converged = false;
};

PoiseuilleRun poiseuille(int ny) {
    SimConfig c;
    c.nx = 3 * ny;
    c.ny = ny;
    c.mode = Mode::Stokes;
    c.cfl_safety = 0.8;
    const SteadyResult r = run_to_steady(c);
    const StaggeredGrid g = c.grid();
    PoiseuilleRun out;
    out.converged = r.converged;
    out.max_div_seen = r.max_div_seen;
    out.div_bound = 10.0 * c.poisson_tol * c.u_max / std::min(g.dx, g.dy);
    const int i = g.nx / 2;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y_center(j);
        const double exact = c.u_max * 4.0 * y * (c.ly - y) / (c.ly * c.ly);
        out.profile_error =
            std::max(out.profile_error, std::abs(r.vel.u(i, j) - exact) / c.u_max);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <configs-dir>\n", argv[0]);
        return 2;
    }
    const fs::path configs(argv[1]);
    const fs::path work = fs::temp_directory_path() / "vpflow_acceptance";
    std::error_code ec;
    fs::remove_all(work, ec);

    SweepData halfball, wall;
    bool halfball_ok = false, wall_ok = false;

    // Criterion 1: half-disc sweep, deformation decay and m-weighted bound.
    try {
        halfball = run_sweep(configs / "halfball.cfg", work / "halfball");
        halfball_ok = true;
        const auto recs = sweep_records(halfball);
        const auto& ms = halfball.plan.sweep;
        bool ok = !recs.empty() && ms.size() == recs.size();
        std::vector<double> def;
        for (const auto* r : recs) {
            ok = ok && r->converged;
            def.push_back(r->deformation_in_S);
        }
        ok = ok && strictly_decreasing(def);
        std::string detail = "def(m) =";
        double ref = 0.0;
        for (std::size_t k = 0; k < def.size(); ++k) {
            const double mdef = ms[k] * def[k];
            if (k == 0) ref = mdef;
            ok = ok && mdef <= kDecayHeadroom * ref;
            detail += " " + fmt(def[k]);
        }
        ok = ok && halfball.seconds < kSweepBudgetSeconds;
        report(1, ok,
               "half-disc deformation decays monotonically, m*def bounded (" + detail +
                   "; " + fmt(halfball.seconds) + " s)");
    } catch (const std::exception& e) {
        report(1, false, std::string("half-disc sweep failed: ") + e.what());
    }

    // Criterion 2: wall sweep decay with a three-decade drop.
    try {
        wall = run_sweep(configs / "wall.cfg", work / "wall");
        wall_ok = true;
        const auto recs = sweep_records(wall);
        bool ok = recs.size() >= 2;
        std::vector<double> def;
        for (const auto* r : recs) {
            ok = ok && r->converged;
            def.push_back(r->deformation_in_S);
        }
        ok = ok && strictly_decreasing(def);
        ok = ok && !def.empty() && def.back() < kWallDecayFactor * def.front();
        report(2, ok,
               "wall deformation decays monotonically, def(m_max)/def(m_min) = " +
                   fmt(def.empty() ? 0.0 : def.back() / def.front()));
    } catch (const std::exception& e) {
        report(2, false, std::string("wall sweep failed: ") + e.what());
    }

    // Criterion 3: penalty-to-rigid profile convergence for both shapes.
    {
        bool ok = halfball_ok && wall_ok;
        std::string detail;
        for (const SweepData* d : {&halfball, &wall}) {
            if (!halfball_ok || !wall_ok) break;
            std::vector<double> rel;
            for (const auto* r : sweep_records(*d)) {
                ok = ok && r->l2_diff_vs_rigid.has_value();
                if (r->l2_diff_vs_rigid) rel.push_back(*r->l2_diff_vs_rigid);
            }
            ok = ok && strictly_decreasing(rel) && !rel.empty() &&
                 rel.back() < kProfileTolerance;
            if (!detail.empty()) detail += ", ";
            detail += fmt(rel.empty() ? 1.0 : rel.back());
        }
        report(3, ok,
               "profile distance to the rigid reference decreases in m; at m_max: " +
                   detail);
    }

    // Criterion 4: no gradient blow-up as the wall penalty stiffens.
    {
        bool ok = wall_ok;
        double lo = 0.0, hi = 0.0;
        if (wall_ok) {
            const auto recs = sweep_records(wall);
            bool first = true;
            for (std::size_t k = 0; k < recs.size(); ++k) {
                if (wall.plan.sweep[k] < 100.0) continue;  // m in {1e2..1e5}
                const double v = recs[k]->grad_max;
                if (first) lo = hi = v;
                first = false;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            ok = !first && lo > 0.0 && hi / lo < kGradMaxSpread;
        }
        report(4, ok,
               "wall grad_max spread over m in {1e2..1e5} is " +
                   fmt(lo > 0.0 ? hi / lo : 0.0) + "x");
    }

    // Criteria 5 and 6: Poiseuille validation and the projection invariant.
    try {
        const PoiseuilleRun p32 = poiseuille(32);
        const PoiseuilleRun p64 = poiseuille(64);
        const bool ok5 = p32.converged && p64.converged &&
                         p32.profile_error < kPoiseuilleTol &&
                         p32.profile_error / p64.profile_error >= kOrderRatio;
        report(5, ok5,
               "parabolic profile error " + fmt(p32.profile_error) + " at ny=32, ratio " +
                   fmt(p32.profile_error / p64.profile_error) + " at ny=64");
        const bool ok6 = p32.max_div_seen <= p32.div_bound &&
                         p64.max_div_seen <= p64.div_bound;
        report(6, ok6,
               "max ||div u||_inf over both runs " +
                   fmt(std::max(p32.max_div_seen, p64.max_div_seen)) +
                   " within bound 10*tol*u_max/h");
    } catch (const std::exception& e) {
        report(5, false, std::string("poiseuille run failed: ") + e.what());
        report(6, false, "projection invariant not evaluated");
    }

    // Criterion 7: operator identities on random interior fields.
    {
        std::mt19937 rng(2026);
        bool ok = true;
        double worst = 0.0;
        for (const auto& [nx, ny] : {std::pair{8, 6}, std::pair{17, 9}}) {
            const StaggeredGrid g = make_grid(1.0, 0.7, nx, ny);
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (int trial = 0; trial < 20; ++trial) {
                ScalarField p(g);
                for (double& x : p.data()) x = dist(rng);
                const VelocityField w = random_interior(g, rng);
                const VelocityField grad = pressure_gradient(p);
                const ScalarField div = divergence(w);
                double lhs = 0.0, rhs = 0.0;
                for (std::size_t k = 0; k < grad.u_data().size(); ++k) {
                    lhs += grad.u_data()[k] * w.u_data()[k];
                }
                for (std::size_t k = 0; k < grad.v_data().size(); ++k) {
                    lhs += grad.v_data()[k] * w.v_data()[k];
                }
                for (std::size_t k = 0; k < p.data().size(); ++k) {
                    rhs -= p.data()[k] * div.data()[k];
                }
                double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-3});
                worst = std::max(worst, std::abs(lhs - rhs) / scale);

                // Summation-by-parts exchange identity behind the Korn bound:
                // sum_corners u_y v_x = sum_cells u_x v_y for interior fields.
                const VelocityField w2 = random_interior(g, rng, 2);
                double corner_sum = 0.0, center_sum = 0.0;
                for (int i = 1; i < g.nx; ++i) {
                    for (int j = 1; j < g.ny; ++j) {
                        corner_sum += ((w2.u(i, j) - w2.u(i, j - 1)) / g.dy) *
                                      ((w2.v(i, j) - w2.v(i - 1, j)) / g.dx);
                    }
                }
                for (int i = 0; i < g.nx; ++i) {
                    for (int j = 0; j < g.ny; ++j) {
                        center_sum += ((w2.u(i + 1, j) - w2.u(i, j)) / g.dx) *
                                      ((w2.v(i, j + 1) - w2.v(i, j)) / g.dy);
                    }
                }
                scale = std::max({std::abs(corner_sum), std::abs(center_sum), 1e-3});
                worst = std::max(worst, std::abs(corner_sum - center_sum) / scale);
            }
        }
        ok = worst < kIdentityTol;
        report(7, ok,
               "div/grad adjointness and strain exchange identity, worst relative "
               "defect " + fmt(worst));
    }

    // Criterion 8: energy estimate; ||grad u|| scales linearly in ||f||.
    try {
        SimConfig c;
        c.nx = 48;
        c.ny = 16;
        c.mode = Mode::Stokes;
        c.u_max = 0.0;
        c.dt = 1.0;
        c.poisson_tol = 1e-12;
        c.implicit_viscous = ImplicitViscous::On;
        const StaggeredGrid g = c.grid();
        const ScalarField nu = build_viscosity_field(g, c.shape, c.viscosity);

        std::mt19937 rng(42);
        const VelocityField f1 = random_interior(g, rng);
        VelocityField f2(g);
        for (std::size_t k = 0; k < f1.u_data().size(); ++k) {
            f2.u_data()[k] = 2.0 * f1.u_data()[k];
        }
        for (std::size_t k = 0; k < f1.v_data().size(); ++k) {
            f2.v_data()[k] = 2.0 * f1.v_data()[k];
        }
        auto march = [&](const VelocityField& f) {
            const StepWorkspace ws(c, nu);
            FlowState s{VelocityField(g), ScalarField(g)};
            for (int k = 0; k < 600; ++k) {
                s = ipcs_step(s, c, nu, nullptr, 1.0, nullptr, &ws, &f);
            }
            return gradient_l2(s.vel);
        };
        const double g1 = march(f1);
        const double g2 = march(f2);
        double f_l2 = 0.0;
        for (double x : f1.u_data()) f_l2 += x * x;
        for (double x : f1.v_data()) f_l2 += x * x;
        f_l2 = std::sqrt(f_l2 * g.dx * g.dy);
        const double defect = std::abs(g2 - 2.0 * g1) / (2.0 * g1);
        const bool ok = g1 > 0.0 && defect < kLinearityTol;
        report(8, ok,
               "||grad u|| doubles with f (defect " + fmt(defect) + "); C1 = " +
                   fmt(g1 / f_l2));
    } catch (const std::exception& e) {
        report(8, false, std::string("energy estimate run failed: ") + e.what());
    }

    // Criterion 9: rerunning the half-disc sweep is byte-identical.
    try {
        bool ok = halfball_ok;
        if (halfball_ok) {
            std::vector<fs::path> files{halfball.dir / "sweep.csv",
                                        halfball.dir / "profile_comparison.csv"};
            for (const RunResult& rr : halfball.outcome.runs) {
                files.push_back(halfball.dir / rr.label / "profile.csv");
            }
            std::vector<std::string> before;
            for (const auto& p : files) before.push_back(slurp(p));
            run_benchmark(halfball.plan, 1);
            for (std::size_t k = 0; k < files.size(); ++k) {
                ok = ok && slurp(files[k]) == before[k];
            }
        }
        report(9, ok, "rerun of the half-disc sweep reproduced every CSV byte for byte");
    } catch (const std::exception& e) {
        report(9, false, std::string("determinism rerun failed: ") + e.what());
    }

    // Criterion 10: two-layer shear against a direct tridiagonal solve.
    {
        double worst = 0.0;
        for (double m : {10.0, 1e4}) {
            const int ny = 32;
            const StaggeredGrid g = make_grid(1.0, 1.0, 8, ny);
            ScalarField nu(g);
            for (int i = 0; i < g.nx; ++i) {
                for (int j = 0; j < g.ny; ++j) {
                    nu(i, j) = g.y_center(j) < 0.5 ? 1.0 : m;
                }
            }
            std::vector<double> cface(ny + 1);
            for (int j = 0; j <= ny; ++j) {
                const int jlo = std::max(j - 1, 0), jhi = std::min(j, ny - 1);
                cface[j] = harmonic_mean(nu(0, jlo), nu(0, jhi));
            }
            std::vector<double> lower(ny), diag(ny), upper(ny), rhs(ny, 1.0);
            const double idy2 = 1.0 / (g.dy * g.dy);
            for (int j = 0; j < ny; ++j) {
                const double cs = (j == 0) ? 2.0 * cface[0] : cface[j];
                const double cn = (j == ny - 1) ? 2.0 * cface[ny] : cface[j + 1];
                lower[j] = (j == 0) ? 0.0 : 0.5 * cface[j] * idy2;
                upper[j] = (j == ny - 1) ? 0.0 : 0.5 * cface[j + 1] * idy2;
                diag[j] = -0.5 * (cs + cn) * idy2;
            }
            std::vector<double> w(ny), cp(ny), dp(ny);
            cp[0] = upper[0] / diag[0];
            dp[0] = rhs[0] / diag[0];
            for (int j = 1; j < ny; ++j) {
                const double den = diag[j] - lower[j] * cp[j - 1];
                cp[j] = upper[j] / den;
                dp[j] = (rhs[j] - lower[j] * dp[j - 1]) / den;
            }
            w[ny - 1] = dp[ny - 1];
            for (int j = ny - 2; j >= 0; --j) w[j] = dp[j] - cp[j] * w[j + 1];

            VelocityField vel(g);
            for (int i = 0; i <= g.nx; ++i) {
                for (int j = 0; j < g.ny; ++j) vel.u(i, j) = w[j];
            }
            const VelocityField out = stress_divergence(vel, nu);
            for (int i = 1; i < g.nx; ++i) {
                for (int j = 0; j < g.ny; ++j) {
                    worst = std::max(worst, std::abs(out.u(i, j) - 1.0));
                }
            }
        }
        report(10, worst < kOracleTol,
               "two-layer stress operator matches the tridiagonal oracle, max node "
               "error " + fmt(worst));
    }

    return g_all_ok ? 0 : 1;
}
