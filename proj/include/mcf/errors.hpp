#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

// Evaluation point outside the open domain of an explicit solution.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Engineered initial data failed its pointwise verification.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcf
