#pragma once

#include <stdexcept>
#include <string>

namespace vmsgf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration (mesh, regions, discretization sizes, files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (point outside the mesh, unknown
// multi-index, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite or ill-conditioned intermediate quantities.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// A run would exceed a configured resource limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace vmsgf
