#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vpflow/errors.hpp"
#include "vpflow/harness.hpp"

namespace fs = std::filesystem;
using namespace vpflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
}

BenchmarkPlan load_plan(const std::string& path, const std::string& output_dir) {
    BenchmarkPlan plan = parse_config(slurp(path));
    if (!output_dir.empty()) plan.output_dir = output_dir;
    return plan;
}

int cmd_run(const BenchmarkPlan& plan) {
    const SimConfig& config = plan.base;
    const SteadyResult res = run_to_steady(config);
    DiagnosticsRecord rec = collect(res.vel, res.p, config);
    rec.steps = res.steps;
    rec.converged = res.converged;

    fs::create_directories(plan.output_dir);
    const fs::path dir(plan.output_dir);
    for (OutputFormat f : plan.formats) {
        if (f == OutputFormat::Csv) {
            spit(dir / "profile.csv", profile_csv(rec.profile));
        } else {
            const StaggeredGrid g = config.grid();
            ScalarField nu;
            if (config.mode == Mode::Rigid) {
                nu = ScalarField(g);
                for (double& x : nu.data()) x = config.viscosity.nu_fluid;
            } else {
                nu = build_viscosity_field(g, config.shape, config.viscosity);
            }
            write_vtk(res.vel, res.p, nu, rigid_mask(g, config.shape),
                      (dir / "fields.vtk").string());
        }
    }

    std::printf("steps               %ld\n", rec.steps);
    std::printf("converged           %s\n", rec.converged ? "yes" : "no");
    std::printf("deformation_in_S    %.6e\n", rec.deformation_in_S);
    std::printf("total_dissipation   %.6e\n", rec.total_dissipation);
    std::printf("grad_max            %.6e\n", rec.grad_max);
    std::printf("grad_l2             %.6e\n", rec.grad_l2);
    std::printf("div_max             %.6e\n", rec.div_max);
    if (!rec.converged) {
        std::fprintf(stderr, "error: run did not reach the steady tolerance within %ld steps\n",
                     config.max_steps);
        return 1;
    }
    return 0;
}

int cmd_sweep(const BenchmarkPlan& plan, int threads) {
    const BenchmarkOutcome outcome = run_benchmark(plan, threads);
    for (const RunResult& rr : outcome.runs) {
        if (rr.failed) {
            std::printf("%-12s FAILED  %s\n", rr.label.c_str(), rr.error.c_str());
        } else {
            std::printf("%-12s ok  steps=%ld deformation_in_S=%.6e\n", rr.label.c_str(),
                        rr.record.steps, rr.record.deformation_in_S);
        }
    }
    std::printf("wrote %s/sweep.csv\n", plan.output_dir.c_str());
    return outcome.any_failed ? 1 : 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    const ProfileRecord a = parse_profile_csv(slurp(path_a));
    const ProfileRecord b = parse_profile_csv(slurp(path_b));
    const ProfileDiff diff = profile_difference(a, b);
    std::printf("%-14s %-24s %-24s\n", "metric", path_a.c_str(), path_b.c_str());
    std::printf("samples        %-24zu %-24zu\n", a.y.size(), b.y.size());
    std::printf("l2             %.17g\n", diff.l2);
    std::printf("linf           %.17g\n", diff.linf);
    std::printf("relative_l2    %.17g\n", diff.relative_l2);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viscous-penalty channel flow driver"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    std::string csv_a, csv_b;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "Run a single simulation");
    run->add_option("config", config_path, "Configuration file")->required();
    run->add_option("--output-dir", output_dir, "Override the output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "Run the full viscosity sweep");
    sweep->add_option("config", config_path, "Configuration file")->required();
    sweep->add_option("--threads", threads, "Max concurrent sweep members (0 = all cores)");
    sweep->add_option("--output-dir", output_dir, "Override the output directory");

    CLI::App* validate = app.add_subcommand("validate", "Parse and echo the effective config");
    validate->add_option("config", config_path, "Configuration file")->required();

    CLI::App* compare = app.add_subcommand("compare", "Compare two profile CSVs");
    compare->add_option("csvA", csv_a, "First profile CSV")->required();
    compare->add_option("csvB", csv_b, "Second profile CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(load_plan(config_path, output_dir));
        if (sweep->parsed()) {
            BenchmarkPlan plan = load_plan(config_path, output_dir);
            return cmd_sweep(plan, threads);
        }
        if (validate->parsed()) {
            const BenchmarkPlan plan = load_plan(config_path, "");
            std::cout << echo_config(plan);
            return 0;
        }
        if (compare->parsed()) return cmd_compare(csv_a, csv_b);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
