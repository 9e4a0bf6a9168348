#pragma once

#include <stdexcept>
#include <string>

namespace shearlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition at an API boundary.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy result.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// A Malliavin sample whose determinant fell below the degeneracy floor.
class DegenerateSampleError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace shearlab
