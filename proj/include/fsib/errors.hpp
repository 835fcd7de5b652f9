#pragma once

#include <stdexcept>
#include <string>

namespace fsib {

// Beam touches (or crosses) the channel bottom: 1 + eta <= 0, or the
// fixed-point gap bound min(1+eta) >= 1/(2*mu) is violated.
struct CollisionError : std::runtime_error {
    double margin;
    explicit CollisionError(const std::string& what, double margin_ = 0.0)
        : std::runtime_error(what), margin(margin_) {}
};

// Mismatched array lengths / incompatible grids.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of definition (e.g. x not in [0,L]).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An operation precondition failed (incompatible data, corner values, ...).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Linear solver did not reach the requested residual.
struct SolverError : std::runtime_error {
    double residual;
    explicit SolverError(const std::string& what, double residual_ = 0.0)
        : std::runtime_error(what), residual(residual_) {}
};

// Fixed-point iterate left the ball B(x0,R,mu,T).
struct BallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fsib
