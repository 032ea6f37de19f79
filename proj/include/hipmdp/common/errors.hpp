#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hipmdp {

/// Raised when a computation produces a non-finite value. `index` names the
/// offending element when one exists (e.g. a gradient coordinate).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(what), index_(index) {}

  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// Operation called on an object in a state that cannot serve it
/// (e.g. sampling from an empty replay buffer).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad or missing configuration, unknown keys, missing checkpoints.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Environment instance sampling could not find a well-behaved draw.
class InstanceGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hipmdp
