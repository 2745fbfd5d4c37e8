#pragma once

#include <stdexcept>
#include <string>

namespace cfgtune {

/// Raised when user-supplied input (files, settings, values) fails validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a function is called outside its documented preconditions.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an experiment cannot be carried out or the campaign cannot proceed.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a persisted campaign state is unreadable or inconsistent with its replay.
class StateCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfgtune
