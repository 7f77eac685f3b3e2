#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class RankOutOfRange : public Error {
 public:
  using Error::Error;
};

class RankExceedsVariety : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// The Armijo condition could not be met within max_backtracks halvings.
class BacktrackFailed : public Error {
 public:
  using Error::Error;
};

/// A step was requested from a point whose stationarity measure is zero.
class StationaryInput : public Error {
 public:
  using Error::Error;
};

class UnknownScenario : public Error {
 public:
  using Error::Error;
};

class NoOracle : public Error {
 public:
  using Error::Error;
};

}  // namespace lowrank
