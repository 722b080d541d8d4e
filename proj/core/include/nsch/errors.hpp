#pragma once

#include <stdexcept>
#include <string>

namespace nsch {

/// Base class for every failure raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration (bad key, bad value, violated precondition).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Time step violates the advective CFL restriction dt <= 0.5 min(h) / max|u|.
class CFLViolation : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Nonlinear or linear solver did not converge; the step is aborted.
class SolverError : public Error {
public:
    using Error::Error;
};

class NewtonDiverged : public SolverError {
public:
    NewtonDiverged(const std::string& what, double residual, int iterations)
        : SolverError(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class LinearSolveFailed : public SolverError {
public:
    using SolverError::SolverError;
};

class ActiveSetCycling : public SolverError {
public:
    using SolverError::SolverError;
};

/// Per-step energy defect exceeded the tolerance in strict mode.
class EnergyInequalityViolated : public SolverError {
public:
    using SolverError::SolverError;
};

/// A time step failed; carries the index of the step that aborted.
class StepFailed : public SolverError {
public:
    StepFailed(long step, const std::string& what)
        : SolverError("step " + std::to_string(step) + ": " + what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class NotSeparated : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nsch
