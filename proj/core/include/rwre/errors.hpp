#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model, volume, constants or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A site was requested outside a realized Gibbs window.
class WindowExceeded : public Error {
 public:
  using Error::Error;
};

/// Linear system could not be solved (singular or over the size cap).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed its configured cap.
class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

/// An estimator is degenerate, e.g. a denominator indistinguishable from 0.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A truncation or Cesaro schedule failed to stabilise.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rwre
