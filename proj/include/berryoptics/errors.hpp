#pragma once

#include <stdexcept>
#include <string>

namespace berryoptics {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid physical or numerical input (violated precondition).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Adaptive quadrature failed to reach the requested tolerance.
/// Carries the best value obtained so far and its error estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double partial, double estimate)
        : Error(msg), partial_value(partial), error_estimate(estimate) {}
    double partial_value;
    double error_estimate;
};

/// ODE integration failure (step-size underflow or step budget exhausted).
class SolverError : public Error {
public:
    SolverError(const std::string& msg, double t, long steps, long rejected)
        : Error(msg), t_fail(t), steps(steps), rejected(rejected) {}
    double t_fail;
    long steps;
    long rejected;
};

/// Spectral propagation would alias: grid too coarse for the imprinted phase.
class AliasingError : public Error {
public:
    explicit AliasingError(const std::string& msg) : Error(msg) {}
};

}  // namespace berryoptics
