#pragma once

#include <stdexcept>
#include <string>

namespace vpflow {

/// Invalid user-facing configuration (geometry, grid sizes, config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solve ran out of iterations before reaching its tolerance.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& context, int iterations, double residual,
                   long step = -1)
        : std::runtime_error(context + ": no convergence after " +
                             std::to_string(iterations) +
                             " iterations, residual " + std::to_string(residual) +
                             (step >= 0 ? " (time step " + std::to_string(step) + ")" : "")),
          iterations(iterations), residual(residual), step(step) {}

    int iterations;
    double residual;
    long step;  // time step at which the failure occurred, -1 if not inside a march
};

/// A field value blew past the stability guard during time marching.
class Instability : public std::runtime_error {
public:
    Instability(double value, long step)
        : std::runtime_error("field value " + std::to_string(value) +
                             " exceeds stability guard at step " + std::to_string(step)),
          value(value), step(step) {}

    double value;
    long step;
};

}  // namespace vpflow
