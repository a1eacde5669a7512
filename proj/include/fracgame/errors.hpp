#pragma once

#include <stdexcept>
#include <string>

namespace fracgame {

/// Caller broke a documented precondition (misaligned grid, bad order, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario or command-line configuration is malformed. `field()` names the
/// offending key when one is known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Numerical failure: series non-convergence, solver blow-up.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Game-tree search would exceed the configured size budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracgame
