#pragma once

#include <stdexcept>
#include <string>

namespace tcval {

/// Base of every error raised by the library. The CLI maps ConfigError to
/// exit code 2 and every other Error to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run parameters. The message names the field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A payoff broke its declared monotonicity or positivity.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Value outside the domain where an operator is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

/// The expectation behind a closed-form price does not exist.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced inside an engine.
class NumericalError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

/// The requested closed-form representation does not exist for the inputs.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace tcval
