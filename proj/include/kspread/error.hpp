#pragma once

#include <stdexcept>
#include <string>

namespace kspread {

// Base of every error raised by the library. Subclasses let callers
// distinguish configuration mistakes from numerical failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// Allocation would exceed the configured memory budget.
class ResourceError : public Error {
public:
  using Error::Error;
};

// Operator does not commute with the reflection and would leak between sectors.
class SymmetryViolation : public Error {
public:
  using Error::Error;
};

class NotHermitian : public Error {
public:
  using Error::Error;
};

// Zero level spacing; usually means the spectrum was not desymmetrized.
class DegenerateSpectrum : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace kspread
