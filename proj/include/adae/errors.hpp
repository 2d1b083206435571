#pragma once

#include <stdexcept>
#include <string>

namespace adae {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Pencil is rank deficient at every regularity probe.
class SingularPencil : public Error {
 public:
  using Error::Error;
};

class NotInResolventSet : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

class PatternViolation : public Error {
 public:
  using Error::Error;
};

class ChainStalled : public Error {
 public:
  using Error::Error;
};

class ChainNotStabilized : public Error {
 public:
  using Error::Error;
};

class NotInjectiveOnVk : public Error {
 public:
  using Error::Error;
};

class HorizonTooShort : public Error {
 public:
  using Error::Error;
};

/// Forcing lacks the derivatives the detected index requires.
class InsufficientSmoothness : public Error {
 public:
  using Error::Error;
};

class DecompositionUnavailable : public Error {
 public:
  using Error::Error;
};

class StepSingular : public Error {
 public:
  using Error::Error;
};

}  // namespace adae
