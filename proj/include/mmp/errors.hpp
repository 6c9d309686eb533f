// errors.hpp: exception types thrown by the library.

#pragma once

#include <stdexcept>
#include <string>

namespace mmp {

struct HermitianViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BlockOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct UnsupportedExponent : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExponentOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConsistencyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries the simulation time at which the norm guard tripped.
struct Instability : std::runtime_error {
    double time;
    Instability(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
};

struct WindowUnderflow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mmp
