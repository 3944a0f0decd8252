#pragma once

#include <stdexcept>
#include <string>

namespace tensorchan {

// Raised when a caller violates a documented precondition (bad mode, shape
// mismatch, rank larger than a dimension, parameter out of range).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine cannot produce a result for valid input
// (e.g. a singular solve that survives diagonal loading).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File and directory failures, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace tensorchan
