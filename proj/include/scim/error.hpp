#pragma once

#include <stdexcept>
#include <string>

namespace scim {

/// Invalid scenario or parameter file. `field()` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A caller broke an operation's precondition (out-of-bounds action, step after done, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Problem instance too large for an exhaustive routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Training produced non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scim
