#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace muxlink {

/// Input outside the mathematical domain of an operation (bad angle, non-PSD matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A visibility or Bell estimate requested from data with no coincidences.
class UndefinedEstimate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters that leave the first-order regime the probability tables are valid in.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario parse or validation failure. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace muxlink
