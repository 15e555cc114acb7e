#ifndef VCTRL_ERRORS_HPP
#define VCTRL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vctrl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters, controls, weights or problem setup.
class ParamError : public Error {
public:
    using Error::Error;
};

/// A query outside the domain of a trajectory or grid.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite state or could not make progress.
class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(double t, const std::string& what)
        : Error("integration diverged at t=" + std::to_string(t) + ": " + what), time_(t)
    {
    }

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Malformed configuration text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A well-formed configuration value that violates its constraints.
class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key))
    {
    }

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace vctrl

#endif
