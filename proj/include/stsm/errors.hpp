#pragma once

#include <stdexcept>
#include <string>

namespace stsm {

/// Base of every error the library raises. exit_code() is the process status
/// the command-line front end maps the error to.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

/// Malformed, inconsistent or unknown configuration.
class ConfigError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Physical input outside the domain of a model (evanescent wave, wavelength
/// outside the dispersion band, zero-norm mode, ...).
class DomainError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Solver failure or quadrature that did not converge.
class NumericalError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// A structural invariant of a computed result was violated.
class InvariantError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

} // namespace stsm
