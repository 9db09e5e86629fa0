#pragma once

#include <stdexcept>
#include <string>

namespace zrp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver did not reach its tolerance within the iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a memory or enumeration budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Both a particle count and a density were given.
class ConflictingDensitySpec : public ConfigError {
 public:
  ConflictingDensitySpec()
      : ConfigError("N/rho", "exactly one of --N or --rho must be given") {}
};

}  // namespace zrp
