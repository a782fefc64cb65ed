#pragma once

#include <stdexcept>
#include <string>

namespace wrist {

/// Non-finite or otherwise malformed argument.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the physical domain (e.g. negative electrical power).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Actuator lengths violate the closure constraint L1+L2+L3 = 3h.
struct InconsistentLengthsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Actuator lengths satisfy closure but map outside the reachable pose set.
struct InfeasibleLengthsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Geometry parameters admit no solution (e.g. 2r > l2).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Assembled model lost a structural property (e.g. mass matrix not PD).
struct ModelAssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mass matrix singular at the requested state.
struct SingularDynamicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulation produced a non-finite state.
struct DivergenceError : std::runtime_error {
    double time_s;
    DivergenceError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t=" + std::to_string(t) + " s"), time_s(t) {}
};

/// Configuration file could not be parsed or validated.
struct ConfigError : std::runtime_error {
    int line;  // -1 when not tied to a specific line
    explicit ConfigError(const std::string& msg, int line_no = -1)
        : std::runtime_error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
};

/// Data file does not match the expected schema.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wrist
