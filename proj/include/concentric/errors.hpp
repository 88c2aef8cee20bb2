#pragma once

#include <stdexcept>
#include <string>

namespace concentric {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller-supplied data: malformed files, too few points, bad flags.
class InputError : public Error {
 public:
  using Error::Error;
};

class NotAnEllipse : public Error {
 public:
  using Error::Error;
};

/// theta does not describe K real concentric ellipses.
class NotConcentricEllipses : public Error {
 public:
  using Error::Error;
};

/// Ring axes are not a common multiple of the innermost ring's axes.
class NotProportional : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class EmptyRing : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientPoints : public InputError {
 public:
  using InputError::InputError;
};

/// theta^T N theta vanishes at the true scene, so the second-order bias of
/// that constraint is undefined.
class DegenerateConstraint : public Error {
 public:
  using Error::Error;
};

class AllRunsFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace concentric
