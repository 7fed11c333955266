#pragma once

#include <stdexcept>
#include <string>

namespace llb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration: bad parameters, malformed input files, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent data structures: index out of range, non-nested meshes, size mismatch.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An iterative linear solver failed to reach its tolerance or broke down.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The nonlinear fixed-point iteration exceeded its iteration budget.
class FixedPointError : public Error {
 public:
  using Error::Error;
};

/// I/O failure while reading or writing files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace llb
