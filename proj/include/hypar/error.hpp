// Exception hierarchy shared by every hypar module.
#pragma once

#include <stdexcept>
#include <string>

namespace hypar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid extents, cell counts, tolerances or other setup values out of range.
class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

/// Kernel horizon too small for the grid: the renormalizing denominator vanishes.
class DegenerateKernel : public Error {
public:
    using Error::Error;
};

/// An explicit step was requested with a time step above the CFL limit.
class StabilityError : public Error {
public:
    using Error::Error;
};

class LinearSolverError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a mathematical function (e.g. t <= s for a kernel).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

/// A model coefficient violated its declared bound.
class ModelSpecError : public Error {
public:
    using Error::Error;
};

/// Picard iteration kept failing to contract even on the smallest allowed window.
class NonContraction : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid configuration file; the message carries key path and line.
class ParseError : public Error {
public:
    ParseError(const std::string& key, int line, const std::string& what)
        : Error(format(key, line, what)), key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& what) {
        std::string msg;
        if (line > 0) msg += "line " + std::to_string(line) + ": ";
        if (!key.empty()) msg += "'" + key + "': ";
        return msg + what;
    }

    std::string key_;
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hypar
