#pragma once

#include <stdexcept>
#include <string>

namespace oblim {

/// Bad user input: grid sizes, parameters, config files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Mismatched grids, out-of-range axes, non-positive weights.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A state violates a physical invariant (density, divergence, finiteness).
class StateError : public std::runtime_error {
 public:
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

/// A time integration failed; carries the simulation time of the failure.
class StepError : public std::runtime_error {
 public:
  StepError(double time, const std::string& what)
      : std::runtime_error("t=" + std::to_string(time) + ": " + what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oblim
