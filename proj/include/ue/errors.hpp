#pragma once

#include <stdexcept>
#include <string>

namespace ue {

// Dimension or length disagreement between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact enumeration would exceed its configured budget; use Monte Carlo.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value failed its type invariant (trace, Hermiticity, completeness, ...).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed serialized data or an undecodable plaintext.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Garbled-circuit or PKE label recovery failed.
class DecryptionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ue
