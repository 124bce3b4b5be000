#pragma once

#include <stdexcept>
#include <string>

namespace graphdis {

// Base class for every error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter or argument violates a documented bound.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A graph does not fit into the fixed padding size.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes are incompatible for an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity appeared where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or incompatible input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphdis
