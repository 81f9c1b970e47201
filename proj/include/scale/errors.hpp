#pragma once

#include <stdexcept>
#include <string>

namespace scale {

// Bad hyperparameters or mismatched shapes. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user data: token ids out of range, bad JSONL, unreadable files.
// CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition. CLI exit code 2.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A chunk too short to yield disjoint left/right boundaries.
class DegenerateChunkError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scale
