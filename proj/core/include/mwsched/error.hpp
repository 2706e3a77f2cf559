#pragma once

#include <stdexcept>
#include <string>

namespace mwsched {

/// Invalid model, scenario or argument supplied by the caller.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal precondition or invariant did not hold.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An exact computation was requested that the library refuses to approximate.
class ExactCheckUnavailable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mwsched
