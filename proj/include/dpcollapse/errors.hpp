#pragma once

#include <stdexcept>
#include <string>

namespace dpcollapse {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  ok = 0,
  configuration = 2,
  numerical = 3,
  inconclusive = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

/// Bad user input: unknown preset, schema violation, invariant violation.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::configuration; }
};

/// A parameter violates its domain-type invariant (R0 <= 0, m < 0, ...).
class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Dimensionally incompatible unit conversion or unparsable unit string.
class UnitError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

/// Adaptive quadrature did not reach the requested tolerance.
class OracleFailure : public NumericalError {
 public:
  OracleFailure(const std::string& what, double best_estimate, double error_estimate)
      : NumericalError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// Time step violates the accuracy gate of an integrator.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dpcollapse
