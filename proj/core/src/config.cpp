#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "vpflow/errors.hpp"
#include "vpflow/harness.hpp"

namespace vpflow {

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

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ", key '" + key +
                      "': " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') fail(line, key, "invalid number '" + v + "'");
    return x;
}

long parse_long(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') fail(line, key, "invalid integer '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line, key, "invalid boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

void BenchmarkPlan::validate() const {
    base.validate();
    if (sweep.empty()) throw ConfigError("sweep m_values must be non-empty");
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        if (sweep[k] < base.viscosity.nu_fluid) {
            throw ConfigError("sweep value " + fmt_g(sweep[k]) +
                              " lies below the fluid viscosity");
        }
        if (k > 0 && !(sweep[k] > sweep[k - 1])) {
            throw ConfigError("sweep m_values must be strictly increasing");
        }
    }
    if (output_dir.empty()) throw ConfigError("output directory must be non-empty");
    if (formats.empty()) throw ConfigError("at least one output format is required");
}

BenchmarkPlan parse_config(const std::string& text) {
    BenchmarkPlan plan;
    std::string shape_kind = "none";
    double center_x = 0.4, radius = 0.0, width = 0.0, height = 0.0;
    bool have_sweep = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, line, "malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "grid" && section != "obstacle" && section != "fluid" &&
                section != "scheme" && section != "sweep" && section != "output") {
                fail(line_no, section, "unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, line, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail(line_no, key, "key outside any section");

        SimConfig& c = plan.base;
        if (section == "grid") {
            if (key == "lx") c.lx = parse_double(value, line_no, key);
            else if (key == "ly") c.ly = parse_double(value, line_no, key);
            else if (key == "nx") c.nx = static_cast<int>(parse_long(value, line_no, key));
            else if (key == "ny") c.ny = static_cast<int>(parse_long(value, line_no, key));
            else fail(line_no, key, "unknown key in [grid]");
        } else if (section == "obstacle") {
            if (key == "shape") {
                if (value != "none" && value != "half_disc" && value != "wall") {
                    fail(line_no, key, "shape must be none, half_disc or wall");
                }
                shape_kind = value;
            } else if (key == "center_x") {
                center_x = parse_double(value, line_no, key);
            } else if (key == "r" || key == "radius") {
                radius = parse_double(value, line_no, key);
            } else if (key == "width") {
                width = parse_double(value, line_no, key);
            } else if (key == "height") {
                height = parse_double(value, line_no, key);
            } else {
                fail(line_no, key, "unknown key in [obstacle]");
            }
        } else if (section == "fluid") {
            if (key == "nu") c.viscosity.nu_fluid = parse_double(value, line_no, key);
            else if (key == "m") c.viscosity.m = parse_double(value, line_no, key);
            else if (key == "u_max") c.u_max = parse_double(value, line_no, key);
            else if (key == "fx") c.body_force[0] = parse_double(value, line_no, key);
            else if (key == "fy") c.body_force[1] = parse_double(value, line_no, key);
            else fail(line_no, key, "unknown key in [fluid]");
        } else if (section == "scheme") {
            if (key == "mode") {
                if (value == "penalty") c.mode = Mode::Penalty;
                else if (value == "rigid") c.mode = Mode::Rigid;
                else if (value == "stokes") c.mode = Mode::Stokes;
                else fail(line_no, key, "mode must be penalty, rigid or stokes");
            } else if (key == "dt") {
                c.dt = parse_double(value, line_no, key);
            } else if (key == "cfl_safety") {
                c.cfl_safety = parse_double(value, line_no, key);
            } else if (key == "steady_tol") {
                c.steady_tol = parse_double(value, line_no, key);
            } else if (key == "max_steps") {
                c.max_steps = parse_long(value, line_no, key);
            } else if (key == "poisson_tol") {
                c.poisson_tol = parse_double(value, line_no, key);
            } else if (key == "poisson_max_iters") {
                c.poisson_max_iters =
                    static_cast<int>(parse_long(value, line_no, key));
            } else if (key == "implicit_viscous") {
                if (value == "auto") c.implicit_viscous = ImplicitViscous::Auto;
                else if (value == "on") c.implicit_viscous = ImplicitViscous::On;
                else if (value == "off") c.implicit_viscous = ImplicitViscous::Off;
                else fail(line_no, key, "implicit_viscous must be auto, on or off");
            } else if (key == "profile_station") {
                c.profile_station = parse_double(value, line_no, key);
            } else {
                fail(line_no, key, "unknown key in [scheme]");
            }
        } else if (section == "sweep") {
            if (key == "m_values") {
                plan.sweep.clear();
                for (const std::string& item : split_list(value)) {
                    plan.sweep.push_back(parse_double(item, line_no, key));
                }
                have_sweep = true;
            } else if (key == "rigid_reference") {
                plan.include_rigid_reference = parse_bool(value, line_no, key);
            } else {
                fail(line_no, key, "unknown key in [sweep]");
            }
        } else if (section == "output") {
            if (key == "directory") {
                plan.output_dir = value;
            } else if (key == "formats") {
                plan.formats.clear();
                for (const std::string& item : split_list(value)) {
                    if (item == "csv") plan.formats.push_back(OutputFormat::Csv);
                    else if (item == "vtk") plan.formats.push_back(OutputFormat::Vtk);
                    else fail(line_no, key, "unknown format '" + item + "'");
                }
            } else {
                fail(line_no, key, "unknown key in [output]");
            }
        }
    }

    if (!have_sweep) {
        throw ConfigError("missing required key 'm_values' in section [sweep]");
    }

    if (shape_kind == "half_disc") {
        plan.base.shape = ObstacleShape::half_disc(center_x, radius);
    } else if (shape_kind == "wall") {
        plan.base.shape = ObstacleShape::rect_wall(center_x, width, height);
    } else {
        plan.base.shape = ObstacleShape::none();
    }

    plan.validate();
    return plan;
}

std::string echo_config(const BenchmarkPlan& plan) {
    const SimConfig& c = plan.base;
    std::ostringstream out;
    out << "[grid]\n";
    out << "lx = " << fmt_shortest(c.lx) << "\n";
    out << "ly = " << fmt_shortest(c.ly) << "\n";
    out << "nx = " << c.nx << "\n";
    out << "ny = " << c.ny << "\n";
    out << "\n[obstacle]\n";
    switch (c.shape.kind) {
        case ObstacleShape::Kind::None:
            out << "shape = none\n";
            break;
        case ObstacleShape::Kind::HalfDisc:
            out << "shape = half_disc\n";
            out << "center_x = " << fmt_shortest(c.shape.center_x) << "\n";
            out << "r = " << fmt_shortest(c.shape.radius) << "\n";
            break;
        case ObstacleShape::Kind::RectWall:
            out << "shape = wall\n";
            out << "center_x = " << fmt_shortest(c.shape.center_x) << "\n";
            out << "width = " << fmt_shortest(c.shape.width) << "\n";
            out << "height = " << fmt_shortest(c.shape.height) << "\n";
            break;
    }
    out << "\n[fluid]\n";
    out << "nu = " << fmt_shortest(c.viscosity.nu_fluid) << "\n";
    out << "m = " << fmt_shortest(c.viscosity.m) << "\n";
    out << "u_max = " << fmt_shortest(c.u_max) << "\n";
    out << "fx = " << fmt_shortest(c.body_force[0]) << "\n";
    out << "fy = " << fmt_shortest(c.body_force[1]) << "\n";
    out << "\n[scheme]\n";
    out << "mode = "
        << (c.mode == Mode::Penalty ? "penalty"
                                    : (c.mode == Mode::Rigid ? "rigid" : "stokes"))
        << "\n";
    out << "dt = " << fmt_shortest(c.dt) << "\n";
    out << "cfl_safety = " << fmt_shortest(c.cfl_safety) << "\n";
    out << "steady_tol = " << fmt_shortest(c.steady_tol) << "\n";
    out << "max_steps = " << c.max_steps << "\n";
    out << "poisson_tol = " << fmt_shortest(c.poisson_tol) << "\n";
    out << "poisson_max_iters = " << c.poisson_max_iters << "\n";
    out << "implicit_viscous = "
        << (c.implicit_viscous == ImplicitViscous::Auto
                ? "auto"
                : (c.implicit_viscous == ImplicitViscous::On ? "on" : "off"))
        << "\n";
    out << "profile_station = " << fmt_shortest(c.profile_station) << "\n";
    out << "\n[sweep]\n";
    out << "m_values = ";
    for (std::size_t k = 0; k < plan.sweep.size(); ++k) {
        if (k) out << ",";
        out << fmt_shortest(plan.sweep[k]);
    }
    out << "\n";
    out << "rigid_reference = " << (plan.include_rigid_reference ? "true" : "false")
        << "\n";
    out << "\n[output]\n";
    out << "directory = " << plan.output_dir << "\n";
    out << "formats = ";
    for (std::size_t k = 0; k < plan.formats.size(); ++k) {
        if (k) out << ",";
        out << (plan.formats[k] == OutputFormat::Csv ? "csv" : "vtk");
    }
    out << "\n";
    return out.str();
}

}  // namespace vpflow
