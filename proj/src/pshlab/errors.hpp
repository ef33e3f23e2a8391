#pragma once

#include <stdexcept>
#include <string>

namespace pshlab {

// Error taxonomy mirrored by the C API status codes (see include/pshlab/pshlab.h).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

// Violated mathematical precondition (point outside domain, child >= -gamma, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain violation: " + msg) {}
};

struct SingularPointError : Error {
    explicit SingularPointError(const std::string& msg) : Error("singular point: " + msg) {}
};

// Quadrature / estimation could not produce a usable answer (budget too small,
// redraw cap hit, misclassified bisection window, ...).
struct EstimationError : Error {
    explicit EstimationError(const std::string& msg) : Error("estimation failure: " + msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

}  // namespace pshlab
