#pragma once

#include <stdexcept>
#include <string>

namespace kvn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/* grid too coarse for a requested width, or a filter narrower than the grid */
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/* evaluation outside the range a model is defined on */
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class FilterCollapseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/* state passed in the wrong representation; a programming error */
class BasisError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kvn
