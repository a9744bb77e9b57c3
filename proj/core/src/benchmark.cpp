#include <algorithm>
#include <cstdlib>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "vpflow/errors.hpp"
#include "vpflow/harness.hpp"

namespace vpflow {

const char* const kSweepCsvHeader =
    "m,deformation_in_S,total_dissipation,grad_max,grad_l2,div_max,"
    "relative_l2_vs_rigid,steps,converged";

namespace {

// Shortest decimal form that parses back to the same double.
std::string fmt_shortest(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

struct Job {
    std::string label;
    SimConfig config;
};

}  // namespace

std::string sweep_csv_row(const std::string& m_label, const DiagnosticsRecord& rec) {
    std::ostringstream out;
    out << m_label << "," << fmt_shortest(rec.deformation_in_S) << ","
        << fmt_shortest(rec.total_dissipation) << "," << fmt_shortest(rec.grad_max) << ","
        << fmt_shortest(rec.grad_l2) << "," << fmt_shortest(rec.div_max) << ",";
    if (rec.l2_diff_vs_rigid) out << fmt_shortest(*rec.l2_diff_vs_rigid);
    out << "," << rec.steps << "," << (rec.converged ? 1 : 0);
    return out.str();
}

std::string profile_csv(const ProfileRecord& profile) {
    std::ostringstream out;
    out << "x_station,y,velocity_magnitude\n";
    for (std::size_t k = 0; k < profile.y.size(); ++k) {
        out << fmt_shortest(profile.x_station) << "," << fmt_shortest(profile.y[k]) << ","
            << fmt_shortest(profile.magnitude[k]) << "\n";
    }
    return out.str();
}

ProfileRecord parse_profile_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x_station", 0) != 0) {
        throw ConfigError("not a profile CSV (missing header)");
    }
    ProfileRecord rec;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
            !std::getline(ss, c)) {
            throw ConfigError("malformed profile CSV row: " + line);
        }
        const double station = std::stod(a);
        if (first) {
            rec.x_station = station;
            first = false;
        } else if (station != rec.x_station) {
            throw ConfigError("profile CSV mixes stations");
        }
        rec.y.push_back(std::stod(b));
        rec.magnitude.push_back(std::stod(c));
    }
    if (rec.y.empty()) throw ConfigError("profile CSV has no samples");
    return rec;
}

BenchmarkOutcome run_benchmark(const BenchmarkPlan& plan, int threads) {
    plan.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(plan.output_dir);
    fs::create_directories(out_dir);

    const bool want_csv = std::find(plan.formats.begin(), plan.formats.end(),
                                    OutputFormat::Csv) != plan.formats.end();
    const bool want_vtk = std::find(plan.formats.begin(), plan.formats.end(),
                                    OutputFormat::Vtk) != plan.formats.end();

    std::vector<Job> jobs;
    if (plan.include_rigid_reference) {
        SimConfig c = plan.base;
        c.mode = Mode::Rigid;
        jobs.push_back({"rigid", c});
    }
    for (double m : plan.sweep) {
        SimConfig c = plan.base;
        if (c.mode == Mode::Rigid) c.mode = Mode::Penalty;
        c.viscosity.m = m;
        jobs.push_back({"m_" + fmt_g(m), c});
    }

    BenchmarkOutcome outcome;
    outcome.runs.resize(jobs.size());

    auto execute = [&](std::size_t k) {
        RunResult& rr = outcome.runs[k];
        const Job& job = jobs[k];
        rr.label = job.label;
        try {
            const SteadyResult res = run_to_steady(job.config);
            rr.record = collect(res.vel, res.p, job.config);
            rr.record.steps = res.steps;
            rr.record.converged = res.converged;
            if (!res.converged) {
                rr.failed = true;
                rr.error = "did not reach the steady tolerance within max_steps";
            }

            const fs::path run_dir = out_dir / job.label;
            fs::create_directories(run_dir);
            if (want_csv) {
                write_file(run_dir / "profile.csv", profile_csv(rr.record.profile));
            }
            if (want_vtk) {
                const StaggeredGrid g = job.config.grid();
                ScalarField nu;
                ScalarField mask = rigid_mask(g, job.config.shape);
                if (job.config.mode == Mode::Rigid) {
                    nu = ScalarField(g);
                    for (double& x : nu.data()) x = job.config.viscosity.nu_fluid;
                } else {
                    nu = build_viscosity_field(g, job.config.shape, job.config.viscosity);
                }
                write_vtk(res.vel, res.p, nu, mask,
                          (run_dir / "fields.vtk").string());
            }
        } catch (const std::exception& e) {
            rr.failed = true;
            rr.error = e.what();
        }
    };

    unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, jobs.size());
    if (n_threads <= 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k) execute(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t k = next.fetch_add(1);
                    if (k >= jobs.size()) return;
                    execute(k);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Penalty-vs-rigid profile distances.
    const RunResult* rigid = nullptr;
    for (const RunResult& rr : outcome.runs) {
        if (rr.label == "rigid" && !rr.failed) rigid = &rr;
    }
    for (RunResult& rr : outcome.runs) {
        if (rigid && &rr != rigid && !rr.failed) {
            rr.record.l2_diff_vs_rigid =
                profile_difference(rr.record.profile, rigid->record.profile).relative_l2;
        }
        outcome.any_failed = outcome.any_failed || rr.failed;
    }

    if (want_csv) {
        std::ostringstream sweep;
        sweep << kSweepCsvHeader << "\n";
        for (const RunResult& rr : outcome.runs) {
            if (rr.failed && rr.record.profile.y.empty()) continue;  // no data at all
            const std::string label =
                rr.label == "rigid" ? "rigid" : rr.label.substr(2);
            sweep << sweep_csv_row(label, rr.record) << "\n";
        }
        write_file(out_dir / "sweep.csv", sweep.str());

        std::ostringstream comp;
        comp << "y";
        std::vector<const RunResult*> ok;
        for (const RunResult& rr : outcome.runs) {
            if (!rr.failed) {
                ok.push_back(&rr);
                comp << "," << rr.label;
            }
        }
        comp << "\n";
        if (!ok.empty()) {
            const std::size_t n = ok.front()->record.profile.y.size();
            for (std::size_t j = 0; j < n; ++j) {
                comp << fmt_shortest(ok.front()->record.profile.y[j]);
                for (const RunResult* rr : ok) {
                    comp << "," << fmt_shortest(rr->record.profile.magnitude[j]);
                }
                comp << "\n";
            }
        }
        write_file(out_dir / "profile_comparison.csv", comp.str());
    }

    return outcome;
}

}  // namespace vpflow
