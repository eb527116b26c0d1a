#pragma once

#include <stdexcept>
#include <string>

namespace stripelab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A scalar argument outside its mathematical domain (e.g. ell <= 0, z outside [0, Z_w]).
struct InvalidParameterError : Error {
    using Error::Error;
};

// A model ingredient is unusable as configured (e.g. non-positive switching rate sample).
struct ModelConfigError : Error {
    using Error::Error;
};

// Too few samples / records to resolve the requested quantity.
struct ResolutionError : Error {
    using Error::Error;
};

struct GridMismatchError : Error {
    using Error::Error;
};

// Requested time step violates the admissible CFL bound.
struct CflError : Error {
    using Error::Error;
};

// Non-finite values appeared during time integration.
struct DivergenceError : Error {
    using Error::Error;
};

// Config text failed to parse or validate; message is line-addressed.
struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace stripelab
