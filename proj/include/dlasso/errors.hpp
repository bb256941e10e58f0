#pragma once

#include <stdexcept>
#include <string>

namespace dlasso {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (out-of-domain parameter, bad flag combination).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Incompatible or unsupported shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV, grid, report).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Matrix factorization failure (e.g. non-positive-definite covariance).
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// Residual collapsed to zero: noise level cannot be estimated.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure in a pipeline stage.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlasso
