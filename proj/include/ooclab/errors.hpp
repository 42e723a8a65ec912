#pragma once

#include <stdexcept>
#include <string>

namespace ooclab {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// I/O and format family.
struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct LabelRangeError : Error {
  using Error::Error;
};
struct ExternalFailure : Error {
  using Error::Error;
};

// Usage and validation family.
struct UsageError : Error {
  using Error::Error;
};
struct ConfigError : UsageError {
  using UsageError::UsageError;
};
struct InvalidGrid : UsageError {
  using UsageError::UsageError;
};
struct ImplausibleContrast : UsageError {
  using UsageError::UsageError;
};
struct ImplausibleTrainingContrast : ImplausibleContrast {
  using ImplausibleContrast::ImplausibleContrast;
};

// Degeneracy family: the input domain is empty or collapses.
struct DegeneracyError : Error {
  using Error::Error;
};
struct DegeneratePhantom : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct InsufficientForeground : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct DegenerateClusters : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct NonMonotoneMap : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct DegenerateSample : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct InsufficientData : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct EmptyInput : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct AllUndefined : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};
struct NoPlausibleCells : DegeneracyError {
  using DegeneracyError::DegeneracyError;
};

}  // namespace ooclab
