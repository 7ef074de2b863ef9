#pragma once

#include <stdexcept>
#include <string>

namespace hfrac {

/// Bad input: malformed config, violated precondition, inconsistent sizes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its stopping criterion or to certify
/// its result. `diagnostic()` carries a multi-line report for the output dir.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string diagnostic = {})
      : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}
  const std::string& diagnostic() const noexcept { return diagnostic_; }

 private:
  std::string diagnostic_;
};

/// A model invariant (irreversibility, admissibility, minimality, ...) was
/// observed to fail. `witness()` describes the offending state.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, std::string witness = {})
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

}  // namespace hfrac
