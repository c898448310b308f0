#pragma once

#include <stdexcept>
#include <string>

namespace pmm {

// Caller broke a documented precondition (bad bond index, non-boundary flip).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Rejected user-supplied data: profile values outside [0,1], CFL violations,
// malformed boxes.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration; key() names the offending key.
class UsageError : public InputError {
 public:
  UsageError(std::string key, const std::string& message)
      : InputError(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// A PDE grid value escaped [−tol, 1 + tol].
struct NumericalInstability : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run that must keep moving reached a configuration with total rate 0.
struct AbsorbedState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fewer than two helper particles are available to build a mobile cluster.
struct InsufficientDensity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pmm
