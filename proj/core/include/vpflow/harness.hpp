#pragma once

#include <string>
#include <vector>

#include "vpflow/diagnostics.hpp"
#include "vpflow/solver.hpp"

namespace vpflow {

enum class OutputFormat { Csv, Vtk };

/// One full benchmark: a base configuration, the penalty-viscosity sweep and
/// an optional rigid-obstacle reference run.
struct BenchmarkPlan {
    SimConfig base;
    std::vector<double> sweep;  // non-empty, strictly increasing m values
    bool include_rigid_reference = true;
    std::string output_dir = "out";
    std::vector<OutputFormat> formats{OutputFormat::Csv};

    void validate() const;

    friend bool operator==(const BenchmarkPlan&, const BenchmarkPlan&) = default;
};

/// Parses the flat sectioned key=value config format ([grid], [obstacle],
/// [fluid], [scheme], [sweep], [output]). Errors carry line number and key.
BenchmarkPlan parse_config(const std::string& text);

/// Canonical text form of a plan with every default resolved;
/// parse_config(echo_config(plan)) reproduces the plan exactly.
std::string echo_config(const BenchmarkPlan& plan);

struct RunResult {
    std::string label;  // "rigid" or "m_<value>"
    DiagnosticsRecord record;
    bool failed = false;
    std::string error;
};

struct BenchmarkOutcome {
    std::vector<RunResult> runs;  // rigid first (when requested), then the sweep
    bool any_failed = false;
};

/**
 * Executes the rigid reference (if requested) and every sweep member,
 * writing per-run artifacts under <output_dir>/<label>/ plus the combined
 * sweep.csv and profile_comparison.csv. Per-run failures are recorded and
 * the remaining runs continue. `threads` caps concurrent runs (0 = hardware
 * concurrency).
 */
BenchmarkOutcome run_benchmark(const BenchmarkPlan& plan, int threads = 0);

/// Fixed sweep.csv column set, exposed for schema tests.
extern const char* const kSweepCsvHeader;

/// Serializes one diagnostics record as a sweep.csv row (m_label is the
/// first column: a number or "rigid").
std::string sweep_csv_row(const std::string& m_label, const DiagnosticsRecord& rec);

/// Profile CSV: "x_station,y,velocity_magnitude" rows.
std::string profile_csv(const ProfileRecord& profile);
ProfileRecord parse_profile_csv(const std::string& text);

/**
 * Legacy ASCII VTK structured-points file with cell-center velocity
 * magnitude, pressure, viscosity and obstacle indicator.
 */
void write_vtk(const VelocityField& vel, const ScalarField& p, const ScalarField& nu,
               const ScalarField& mask, const std::string& path);

}  // namespace vpflow
