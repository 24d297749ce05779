#pragma once

#include <stdexcept>
#include <string>

namespace rotmap {

/// Argument outside the mathematical domain of a scalar map (e.g. h(z) with z < 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data: unequal masses, singular matrices,
/// degenerate boxes, unknown instance names.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rotmap
