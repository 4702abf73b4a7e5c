#pragma once

#include <stdexcept>
#include <string>

namespace cfisac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NetworkConfig (or sweep spec) violates its invariants.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The BS mode vector violates the transmitter/receiver count constraints,
/// or an operation needs a receiver (or transmitter) that does not exist.
class ModeInfeasible : public Error {
 public:
  using Error::Error;
};

/// A receive filter is zero on every receiver block.
class InvalidFilter : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be positive definite is not.
class NumericalDomain : public Error {
 public:
  using Error::Error;
};

/// The communication SINR targets cannot be met within the power budget.
class InfeasibleConstraints : public Error {
 public:
  using Error::Error;
};

/// The conic solver hit its iteration cap or stalled.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfisac
