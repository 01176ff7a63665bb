#pragma once

#include <stdexcept>
#include <string>

namespace gridflow {

/// Raised when the model breaks one of its own invariants (scheduling in the
/// past, double seize, releasing a resource that is not held). These are bugs,
/// not user errors.
class ModelFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid user-supplied configuration. `field()` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed input data (results CSV, checkpoint file).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gridflow
