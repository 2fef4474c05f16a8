#pragma once

#include <stdexcept>
#include <string>

namespace noneq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on a physical input (negative frequency, zero thickness, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double error_estimate, std::string worst_entry)
      : NumericalError(what), error_estimate_(error_estimate), worst_entry_(std::move(worst_entry)) {}
  double error_estimate() const noexcept { return error_estimate_; }
  const std::string& worst_entry() const noexcept { return worst_entry_; }

 private:
  double error_estimate_;
  std::string worst_entry_;
};

/// Slab denominator 1 - r^2 exp(2 i kzm d) vanished (guided-mode pole of a lossless slab).
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Time integration failure: step underflow or trace drift.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace noneq
