#pragma once

#include <stdexcept>
#include <string>

namespace grafica {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input violates a structural precondition (shape, symmetry, empty cluster, ...).
struct StructuralError : Error {
  using Error::Error;
};

/// A file could not be parsed; the message carries file/line context.
struct ParseError : Error {
  using Error::Error;
};

/// A quantity required to be positive collapsed to zero
/// (identical attributes, single-cluster partition, ...).
struct DegenerateError : Error {
  using Error::Error;
};

/// Invalid run configuration (bad grid, missing labels for supervised selection, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem failure; the message carries the path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace grafica
