#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside a function's domain, e.g. an SOC outside [0, 1].
class DomainError : public Error {
public:
    using Error::Error;
};

// An operation defined only for the affine-OCV theory was given another model.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// A simulated SOC left [0, 1] by more than the pack tolerance.
class SocRangeError : public Error {
public:
    SocRangeError(const std::string& what, double time_h) : Error(what), time_h_(time_h) {}
    double time_h() const noexcept { return time_h_; }

private:
    double time_h_;
};

class NonTerminationError : public Error {
public:
    using Error::Error;
};

// A time series does not contain the leg an operation asked for.
class StructureError : public Error {
public:
    using Error::Error;
};

// Failure inside one protocol step. The original exception is nested.
class StepError : public Error {
public:
    StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Malformed text input such as an OCV table.
class FormatError : public Error {
public:
    using Error::Error;
};

// Invalid configuration. `field` is the dotted path of the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pbsim
