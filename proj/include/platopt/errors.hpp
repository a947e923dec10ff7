#pragma once

#include <stdexcept>
#include <string>

namespace platopt {

/// Malformed or inconsistent user input (config file, parameters).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A profile or time series does not cover the requested step.
class OutOfDataError : public std::runtime_error {
public:
    OutOfDataError(const std::string& profile, long index, long length)
        : std::runtime_error("profile '" + profile + "' has no data at step " +
                             std::to_string(index) + " (length " +
                             std::to_string(length) + ")"),
          profile_(profile) {}

    const std::string& profile() const noexcept { return profile_; }

private:
    std::string profile_;
};

/// Argument outside the domain of a closed-form helper.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linearisation point where the nominal flow is zero or reversed.
class InfeasibleNominalError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Problem assembly failed (boundary state inconsistent, window too short).
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver returned no usable solution for a window.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int window_start)
        : std::runtime_error(what + " (window starting at step " +
                             std::to_string(window_start) + ")"),
          window_start_(window_start) {}

    int window_start() const noexcept { return window_start_; }

private:
    int window_start_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace platopt
