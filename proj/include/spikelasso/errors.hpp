#pragma once

#include <stdexcept>
#include <string>

namespace spikelasso {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input data violates a contract (shape mismatch, out-of-range index, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents. Carries the path and a 1-based line number.
class FormatError : public Error {
public:
    FormatError(const std::string& path, long line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what),
          path_(path),
          line_(line) {}

    const std::string& path() const { return path_; }
    long line() const { return line_; }

private:
    std::string path_;
    long line_;
};

/// Non-finite value encountered during a numeric computation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Iterative solver reached its cap without meeting its certificate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double worst_violation)
        : Error(what), worst_violation_(worst_violation) {}

    double worst_violation() const { return worst_violation_; }

private:
    double worst_violation_ = 0.0;
};

/// Inputs make the requested statistical procedure undefined.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

} // namespace spikelasso
