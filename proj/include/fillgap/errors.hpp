#pragma once

#include <stdexcept>
#include <string>

namespace fillgap {

// Index or label outside its admissible range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed argument (bad triple, dimension mismatch, infeasible generator input).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested size exceeds what a code path supports (n cap, dense cap).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A mathematical hypothesis of the routine does not hold (non-regular input, label not neutral).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input vector does not have the structure a true target eigenvector must have.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation requires a numeric mode the parameter vector does not carry.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fillgap
