#pragma once

#include <stdexcept>
#include <string>

namespace tresca {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or topologically invalid mesh data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A deformation produced a triangle with non-positive signed area.
class InversionError : public Error {
 public:
  InversionError(const std::string& what, double min_signed_area)
      : Error(what), min_signed_area_(min_signed_area) {}
  double min_signed_area() const noexcept { return min_signed_area_; }

 private:
  double min_signed_area_;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Field size does not match the mesh it is used with.
class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

/// Linear solver did not reach the requested tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Variational-inequality solver failure (cycling, iteration cap, ...).
class ViSolverError : public SolverError {
 public:
  using SolverError::SolverError;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tresca
