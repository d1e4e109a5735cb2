#pragma once

#include <stdexcept>
#include <string>

namespace compacta {

// Base of every failure the library reports. The CLI maps subclasses onto
// its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a physical or structural invariant. `field` is a dotted
// path such as "cell.g" when the failure originates from a config file.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A division by a vanishing coefficient (e1 = 0, beta0 = 0, alpha0 = 0).
class SingularError : public Error {
 public:
  using Error::Error;
};

// Formula-backend request on a geometry the formulas do not cover.
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

// Root search found no sign change in its bracket.
class BracketingError : public Error {
 public:
  using Error::Error;
};

// Integrator hit a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Step refinement could not reach the requested tolerance.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Operation is undefined in the current damping regime (repeated root).
class RegimeUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace compacta
